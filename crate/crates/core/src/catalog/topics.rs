use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Product;
use crate::error::{Error, Result};

/// Topic given to products no rule matches.
pub const UNASSIGNED: &str = "unassigned";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicRule {
    pub topic: String,
    #[serde(default)]
    pub match_terms: Vec<String>,
    #[serde(default)]
    pub match_cids: Vec<String>,
}

impl TopicRule {
    pub fn validate(&self) -> Result<()> {
        if self.topic.trim().is_empty() {
            return Err(Error::invalid("topic rule", "empty topic"));
        }
        if self.match_terms.is_empty() && self.match_cids.is_empty() {
            return Err(Error::invalid(
                "topic rule",
                format!("`{}` has neither match terms nor match cids", self.topic),
            ));
        }
        Ok(())
    }

    pub fn matches(&self, product: &Product) -> bool {
        let title = product.title.to_lowercase();
        self.match_cids.iter().any(|c| *c == product.cid)
            || self
                .match_terms
                .iter()
                .any(|t| !t.is_empty() && title.contains(&t.to_lowercase()))
    }
}

#[derive(Deserialize)]
struct RuleFile {
    rules: Vec<TopicRule>,
}

/// Parses the ordered `[[rules]]` list of a TOML rule file.
pub fn parse_topic_rules(text: &str) -> Result<Vec<TopicRule>> {
    let file: RuleFile = toml::from_str(text)?;
    for r in &file.rules {
        r.validate()?;
    }
    Ok(file.rules)
}

pub fn load_topic_rules(path: impl AsRef<Path>) -> Result<Vec<TopicRule>> {
    parse_topic_rules(&std::fs::read_to_string(path)?)
}

/// Labels every product with the topic of the first matching rule.
pub fn assign_topics(products: &[Product], rules: &[TopicRule]) -> Result<Vec<Product>> {
    if rules.is_empty() {
        return Err(Error::Empty("topic rule list"));
    }
    for r in rules {
        r.validate()?;
    }
    Ok(products
        .iter()
        .map(|p| {
            let topic = rules
                .iter()
                .find(|r| r.matches(p))
                .map_or(UNASSIGNED, |r| r.topic.as_str());
            Product {
                topic: Some(topic.to_string()),
                ..p.clone()
            }
        })
        .collect())
}
