use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAD: u32 = 0;
pub const BOS: u32 = 1;
pub const EOS: u32 = 2;
pub const SEP: u32 = 3;
pub const MASK: u32 = 4;
pub const NUM_SPECIAL: u32 = 5;

const SPECIAL_NAMES: [&str; NUM_SPECIAL as usize] = ["<pad>", "<bos>", "<eos>", "<sep>", "<mask>"];

pub fn is_special(id: u32) -> bool {
    id < NUM_SPECIAL
}

/// Character vocabulary. Ids below [`NUM_SPECIAL`] are reserved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocab {
    chars: Vec<char>,
    index: HashMap<char, u32>,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.chars.len() + NUM_SPECIAL as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, c: char) -> Option<u32> {
        self.index.get(&c).copied()
    }

    pub fn encode(&self, text: &str) -> Result<Vec<u32>> {
        text.chars()
            .map(|c| self.id(c).ok_or(Error::UnknownCharacter(c)))
            .collect()
    }

    /// Encodes `text`, dropping characters the vocabulary does not know.
    pub fn encode_lossy(&self, text: &str) -> Vec<u32> {
        text.chars().filter_map(|c| self.id(c)).collect()
    }

    pub fn token(&self, id: u32) -> Result<String> {
        if is_special(id) {
            return Ok(SPECIAL_NAMES[id as usize].to_string());
        }
        self.chars
            .get((id - NUM_SPECIAL) as usize)
            .map(|c| c.to_string())
            .ok_or(Error::OutOfVocabulary(id))
    }

    /// Decodes ids to text, skipping special tokens.
    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        let mut out = String::new();
        for &id in ids {
            if is_special(id) {
                continue;
            }
            let c = self
                .chars
                .get((id - NUM_SPECIAL) as usize)
                .ok_or(Error::OutOfVocabulary(id))?;
            out.push(*c);
        }
        Ok(out)
    }

    fn from_chars(chars: Vec<char>) -> Result<Self> {
        let mut index = HashMap::with_capacity(chars.len());
        for (i, &c) in chars.iter().enumerate() {
            if index.insert(c, i as u32 + NUM_SPECIAL).is_some() {
                return Err(Error::invalid(
                    "vocabulary",
                    format!("duplicate character {c:?}"),
                ));
            }
        }
        Ok(Self { chars, index })
    }
}

impl TryFrom<Vec<String>> for Vocab {
    type Error = Error;

    fn try_from(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < NUM_SPECIAL as usize
            || tokens[..NUM_SPECIAL as usize]
                .iter()
                .zip(SPECIAL_NAMES)
                .any(|(a, b)| a != b)
        {
            return Err(Error::invalid(
                "vocabulary",
                "missing reserved special tokens",
            ));
        }
        let mut chars = Vec::with_capacity(tokens.len());
        for t in &tokens[NUM_SPECIAL as usize..] {
            let mut it = t.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => chars.push(c),
                _ => {
                    return Err(Error::invalid(
                        "vocabulary",
                        format!("token {t:?} is not one character"),
                    ))
                }
            }
        }
        Self::from_chars(chars)
    }
}

impl From<Vocab> for Vec<String> {
    fn from(v: Vocab) -> Self {
        SPECIAL_NAMES
            .iter()
            .map(|s| s.to_string())
            .chain(v.chars.iter().map(|c| c.to_string()))
            .collect()
    }
}

/// Character vocabulary over `corpus`, ordered by descending frequency then codepoint.
pub fn build_vocab<S: AsRef<str>>(corpus: &[S]) -> Result<Vocab> {
    let mut counts: BTreeMap<char, usize> = BTreeMap::new();
    for text in corpus {
        for c in text.as_ref().chars() {
            *counts.entry(c).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::Empty("vocabulary corpus"));
    }
    let mut chars: Vec<(char, usize)> = counts.into_iter().collect();
    chars.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Vocab::from_chars(chars.into_iter().map(|(c, _)| c).collect())
}
