use super::DrawingProcedure;
use serde::Serialize;
use std::collections::BTreeSet;

/// Dataset volume and length statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub procedures: usize,
    pub images: usize,
    pub steps: usize,
    pub tokens: usize,
    pub avg_steps_per_procedure: f64,
    pub avg_tokens_per_procedure: f64,
    pub avg_tokens_per_step: f64,
}

/// Whitespace tokens after stripping leading and trailing ASCII punctuation;
/// tokens that are pure punctuation are not counted.
pub fn token_count(text: &str) -> usize {
    text.split_whitespace()
        .filter(|t| !t.trim_matches(|c: char| c.is_ascii_punctuation()).is_empty())
        .count()
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn stats(procedures: &[DrawingProcedure]) -> Summary {
    let images: BTreeSet<&str> = procedures.iter().map(|p| p.image_id.as_str()).collect();
    let steps: usize = procedures.iter().map(|p| p.steps.len()).sum();
    let tokens: usize = procedures
        .iter()
        .flat_map(|p| &p.steps)
        .map(|s| token_count(&s.instruction))
        .sum();
    Summary {
        procedures: procedures.len(),
        images: images.len(),
        steps,
        tokens,
        avg_steps_per_procedure: ratio(steps, procedures.len()),
        avg_tokens_per_procedure: ratio(tokens, procedures.len()),
        avg_tokens_per_step: ratio(tokens, steps),
    }
}
