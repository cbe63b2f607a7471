use hexagons_core::hexboard::Board;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Which kind of abstraction an image is meant to elicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Simple,
    BoundedIteration,
    ConditionalIteration,
    ConditionalStatement,
    Objects,
    Recursion,
    Symmetry,
    Other,
}

impl Category {
    pub const ALL: [Category; 8] = [
        Category::Simple,
        Category::BoundedIteration,
        Category::ConditionalIteration,
        Category::ConditionalStatement,
        Category::Objects,
        Category::Recursion,
        Category::Symmetry,
        Category::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Simple => "simple",
            Category::BoundedIteration => "bounded_iteration",
            Category::ConditionalIteration => "conditional_iteration",
            Category::ConditionalStatement => "conditional_statement",
            Category::Objects => "objects",
            Category::Recursion => "recursion",
            Category::Symmetry => "symmetry",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

/// A target image in the gallery. The board is never blank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageTask {
    pub image_id: String,
    pub target_board: Board,
    pub category: Category,
}
