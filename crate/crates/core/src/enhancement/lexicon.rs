use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest gap a `*` wildcard may span, in characters.
pub const MAX_GAP: usize = 8;
const MAX_PASSES: usize = 8;

/// One forbidden pattern as written in a lexicon file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub pattern: String,
    pub alterable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replacement: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Matcher {
    Literal(Vec<char>),
    /// `prefix`, then 1..=MAX_GAP letters or digits, then `suffix`.
    Gap {
        prefix: Vec<char>,
        suffix: Vec<char>,
    },
}

fn eq(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}

fn literal_at(text: &[char], at: usize, lit: &[char]) -> bool {
    text.len() >= at + lit.len()
        && text[at..at + lit.len()]
            .iter()
            .zip(lit)
            .all(|(a, b)| eq(*a, *b))
}

impl Matcher {
    fn compile(pattern: &str) -> Result<Self> {
        let parts: Vec<&str> = pattern.split('*').collect();
        match parts.as_slice() {
            [lit] if !lit.is_empty() => Ok(Matcher::Literal(lit.chars().collect())),
            [pre, suf] if !pre.is_empty() && !suf.is_empty() => Ok(Matcher::Gap {
                prefix: pre.chars().collect(),
                suffix: suf.chars().collect(),
            }),
            _ => Err(Error::invalid(
                "lexicon pattern",
                format!("`{pattern}` must be a literal or `prefix*suffix` with one wildcard"),
            )),
        }
    }

    /// Length of the (shortest) match starting at `at`.
    fn match_at(&self, text: &[char], at: usize) -> Option<usize> {
        match self {
            Matcher::Literal(lit) => literal_at(text, at, lit).then_some(lit.len()),
            Matcher::Gap { prefix, suffix } => {
                if !literal_at(text, at, prefix) {
                    return None;
                }
                let start = at + prefix.len();
                for gap in 1..=MAX_GAP {
                    let Some(&c) = text.get(start + gap - 1) else {
                        return None;
                    };
                    if !c.is_alphanumeric() {
                        return None;
                    }
                    if literal_at(text, start + gap, suffix) {
                        return Some(prefix.len() + gap + suffix.len());
                    }
                }
                None
            }
        }
    }

    fn find(&self, text: &[char]) -> bool {
        (0..text.len()).any(|i| self.match_at(text, i).is_some())
    }
}

/// Validated set of forbidden patterns, split into alterable and non-alterable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenLexicon {
    entries: Vec<LexiconEntry>,
    matchers: Vec<Matcher>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum FilterOutcome {
    Keep { text: String, altered: bool },
    Drop { pattern: String },
}

impl ForbiddenLexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Result<Self> {
        let matchers = entries
            .iter()
            .map(|e| Matcher::compile(&e.pattern))
            .collect::<Result<Vec<_>>>()?;
        for e in &entries {
            match (e.alterable, &e.replacement) {
                (true, None) => {
                    return Err(Error::invalid(
                        "lexicon",
                        format!("alterable `{}` has no replacement", e.pattern),
                    ))
                }
                (false, Some(_)) => {
                    return Err(Error::invalid(
                        "lexicon",
                        format!("non-alterable `{}` must not have a replacement", e.pattern),
                    ))
                }
                _ => {}
            }
        }
        for e in entries.iter().filter(|e| e.alterable) {
            let rep: Vec<char> = e
                .replacement
                .as_deref()
                .unwrap_or_default()
                .chars()
                .collect();
            if let Some(hit) = matchers.iter().zip(&entries).find(|(m, _)| m.find(&rep)) {
                return Err(Error::invalid(
                    "lexicon",
                    format!(
                        "replacement for `{}` contains pattern `{}`",
                        e.pattern, hit.1.pattern
                    ),
                ));
            }
        }
        Ok(Self { entries, matchers })
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    /// Parses one JSON entry per non-blank line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            entries.push(serde_json::from_str(line).map_err(|e| Error::Parse {
                path: "lexicon".into(),
                line: n + 1,
                message: e.to_string(),
            })?);
        }
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn first_forbidden(&self, text: &[char]) -> Option<&str> {
        self.entries
            .iter()
            .zip(&self.matchers)
            .find(|(e, m)| !e.alterable && m.find(text))
            .map(|(e, _)| e.pattern.as_str())
    }

    /// Patterns (of either kind) occurring in `text`.
    pub fn scan(&self, text: &str) -> Vec<&str> {
        let chars: Vec<char> = text.chars().collect();
        self.entries
            .iter()
            .zip(&self.matchers)
            .filter(|(_, m)| m.find(&chars))
            .map(|(e, _)| e.pattern.as_str())
            .collect()
    }

    /// One left-to-right pass of longest-match-first alterable substitutions.
    fn substitute(&self, text: &[char]) -> (Vec<char>, bool) {
        let mut out = Vec::with_capacity(text.len());
        let mut changed = false;
        let mut i = 0;
        while i < text.len() {
            let best = self
                .entries
                .iter()
                .zip(&self.matchers)
                .filter(|(e, _)| e.alterable)
                .filter_map(|(e, m)| m.match_at(text, i).map(|len| (len, e)))
                .max_by_key(|(len, _)| *len);
            match best {
                Some((len, e)) => {
                    out.extend(e.replacement.as_deref().unwrap_or_default().chars());
                    i += len;
                    changed = true;
                }
                None => {
                    out.push(text[i]);
                    i += 1;
                }
            }
        }
        (out, changed)
    }

    /// Drops text with a non-alterable pattern; rewrites alterable ones.
    pub fn filter(&self, text: &str) -> FilterOutcome {
        let mut chars: Vec<char> = text.chars().collect();
        if let Some(p) = self.first_forbidden(&chars) {
            return FilterOutcome::Drop {
                pattern: p.to_string(),
            };
        }
        let mut altered = false;
        for _ in 0..MAX_PASSES {
            let (next, changed) = self.substitute(&chars);
            if !changed {
                return FilterOutcome::Keep {
                    text: if altered {
                        next.into_iter().collect()
                    } else {
                        text.to_string()
                    },
                    altered,
                };
            }
            altered = true;
            chars = next;
            if let Some(p) = self.first_forbidden(&chars) {
                return FilterOutcome::Drop {
                    pattern: p.to_string(),
                };
            }
        }
        FilterOutcome::Drop {
            pattern: "<alterable substitutions did not converge>".to_string(),
        }
    }
}

pub fn filter_forbidden(text: &str, lexicon: &ForbiddenLexicon) -> FilterOutcome {
    lexicon.filter(text)
}
