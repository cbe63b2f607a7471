use super::DrawingProcedure;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

const RATIOS: [f64; 3] = [0.8, 0.1, 0.1];
const MIN_PROCEDURES: usize = 10;
const HARD_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("need at least {MIN_PROCEDURES} procedures to split, got {0}")]
    TooFew(usize),
    #[error("procedure id `{0}` appears more than once")]
    DuplicateId(String),
    #[error("no image-disjoint 80/10/10 split exists: image `{image_id}` ({size} procedures) does not fit")]
    Infeasible { image_id: String, size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Random,
    Hard,
}

impl FromStr for SplitMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(SplitMode::Random),
            "hard" => Ok(SplitMode::Hard),
            other => Err(format!("unknown split mode `{other}` (expected random|hard)")),
        }
    }
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitMode::Random => "random",
            SplitMode::Hard => "hard",
        })
    }
}

/// A train/dev/test partition of procedure ids. Ids within a bucket are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub mode: SplitMode,
    pub seed: u64,
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
}

impl Split {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.dev.len(), self.test.len())
    }

    fn from_buckets(mode: SplitMode, seed: u64, buckets: [Vec<String>; 3]) -> Split {
        let [mut train, mut dev, mut test] = buckets;
        train.sort();
        dev.sort();
        test.sort();
        Split {
            mode,
            seed,
            train,
            dev,
            test,
        }
    }
}

fn targets(n: usize) -> [f64; 3] {
    RATIOS.map(|r| r * n as f64)
}

pub fn make_split(procedures: &[DrawingProcedure], mode: SplitMode, seed: u64) -> Result<Split, SplitError> {
    let n = procedures.len();
    if n < MIN_PROCEDURES {
        return Err(SplitError::TooFew(n));
    }
    let mut seen = BTreeSet::new();
    for p in procedures {
        if !seen.insert(p.id.as_str()) {
            return Err(SplitError::DuplicateId(p.id.clone()));
        }
    }
    match mode {
        SplitMode::Random => Ok(random_split(procedures, seed)),
        SplitMode::Hard => hard_split(procedures, seed),
    }
}

fn random_split(procedures: &[DrawingProcedure], seed: u64) -> Split {
    let mut ids: Vec<String> = procedures.iter().map(|p| p.id.clone()).collect();
    ids.sort();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let [train_target, dev_target, _] = targets(ids.len());
    let train_len = train_target.round() as usize;
    let dev_len = dev_target.round() as usize;
    let test = ids.split_off(train_len + dev_len);
    let dev = ids.split_off(train_len);
    Split::from_buckets(SplitMode::Random, seed, [ids, dev, test])
}

fn hard_split(procedures: &[DrawingProcedure], seed: u64) -> Result<Split, SplitError> {
    let mut groups: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for p in procedures {
        groups.entry(p.image_id.as_str()).or_default().push(p.id.clone());
    }
    let groups: Vec<(&str, Vec<String>)> = groups.into_iter().collect();
    let goal = targets(procedures.len());

    let mut first_failure = None;
    for attempt in 0..HARD_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.shuffle(&mut rng);
        // Largest images first; the shuffle decides among equal sizes.
        order.sort_by_key(|&g| std::cmp::Reverse(groups[g].1.len()));

        match pack(&groups, &order, goal) {
            Ok(buckets) => return Ok(Split::from_buckets(SplitMode::Hard, seed, buckets)),
            Err(failed) => {
                first_failure.get_or_insert(failed);
            }
        }
    }
    let g = first_failure.expect("at least one attempt ran");
    Err(SplitError::Infeasible {
        image_id: groups[g].0.to_string(),
        size: groups[g].1.len(),
    })
}

/// Greedy placement into the bucket with the largest remaining deficit.
/// Returns the index of the group that could not be placed on failure.
fn pack(groups: &[(&str, Vec<String>)], order: &[usize], goal: [f64; 3]) -> Result<[Vec<String>; 3], usize> {
    let mut buckets: [Vec<String>; 3] = Default::default();
    for &g in order {
        let size = groups[g].1.len();
        let best = (0..3)
            .filter(|&b| (buckets[b].len() + size) as f64 <= goal[b] + 1.0)
            .max_by(|&a, &b| {
                let da = goal[a] - buckets[a].len() as f64;
                let db = goal[b] - buckets[b].len() as f64;
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .ok_or(g)?;
        buckets[best].extend(groups[g].1.iter().cloned());
    }
    let within = (0..3).all(|b| (buckets[b].len() as f64 - goal[b]).abs() <= 1.0);
    if within {
        Ok(buckets)
    } else {
        Err(order[0])
    }
}
