use crate::hexboard::Color;
use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    /// A cardinal or ordinal number, in digits or words.
    Num(u32),
    /// A tile noun: tile, hex, hexagon, spot, cell (and plurals).
    Noun,
    /// `column` / `columns` / `col`.
    Column,
    Color(Color),
    /// paint, color, colour, fill.
    PaintVerb,
    /// `and`, `&` or a comma: joins number lists.
    Conj,
    Word,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Lowercased surface form.
    pub text: String,
    /// Byte span in the original instruction.
    pub span: Range<usize>,
}

pub type TokenStream = Vec<Token>;

const CARDINALS: [&str; 20] = [
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
    "twenty",
];

const ORDINALS: [&str; 20] = [
    "first",
    "second",
    "third",
    "fourth",
    "fifth",
    "sixth",
    "seventh",
    "eighth",
    "ninth",
    "tenth",
    "eleventh",
    "twelfth",
    "thirteenth",
    "fourteenth",
    "fifteenth",
    "sixteenth",
    "seventeenth",
    "eighteenth",
    "nineteenth",
    "twentieth",
];

const NOUNS: [&str; 10] = [
    "tile", "tiles", "hex", "hexes", "hexagon", "hexagons", "spot", "spots", "cell", "cells",
];

const COLOR_SYNONYMS: [(&str, Color); 2] = [("violet", Color::Purple), ("lilac", Color::Purple)];

fn number(word: &str) -> Option<u32> {
    if let Some(i) = CARDINALS.iter().position(|w| *w == word) {
        return Some(i as u32 + 1);
    }
    if let Some(i) = ORDINALS.iter().position(|w| *w == word) {
        return Some(i as u32 + 1);
    }
    let digits_end = word.find(|c: char| !c.is_ascii_digit()).unwrap_or(word.len());
    if digits_end == 0 {
        return None;
    }
    let (digits, suffix) = word.split_at(digits_end);
    match suffix {
        "" | "st" | "nd" | "rd" | "th" => digits.parse().ok(),
        _ => None,
    }
}

fn classify(word: &str) -> TokenKind {
    if let Some(n) = number(word) {
        return TokenKind::Num(n);
    }
    if NOUNS.contains(&word) {
        return TokenKind::Noun;
    }
    if let Some(color) = Color::from_name(word) {
        return TokenKind::Color(color);
    }
    if let Some(&(_, color)) = COLOR_SYNONYMS.iter().find(|(w, _)| *w == word) {
        return TokenKind::Color(color);
    }
    match word {
        "column" | "columns" | "col" => TokenKind::Column,
        "paint" | "color" | "colour" | "fill" => TokenKind::PaintVerb,
        "and" | "&" | "," => TokenKind::Conj,
        w if w.chars().all(|c| c.is_alphanumeric() || c == '\'') => TokenKind::Word,
        _ => TokenKind::Punct,
    }
}

/// Splits an instruction into lowercased word and punctuation tokens and
/// types them.
pub fn normalize(instruction: &str) -> TokenStream {
    let mut tokens = Vec::new();
    let mut chars = instruction.char_indices().peekable();
    while let Some((start, ch)) = chars.next() {
        if ch.is_whitespace() {
            continue;
        }
        let mut end = start + ch.len_utf8();
        if ch.is_alphanumeric() {
            while let Some(&(i, c)) = chars.peek() {
                if c.is_alphanumeric() || c == '\'' {
                    end = i + c.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
        }
        let text = instruction[start..end].to_lowercase();
        let kind = classify(text.trim_end_matches("'s"));
        tokens.push(Token {
            kind,
            text,
            span: start..end,
        });
    }
    tokens
}
