use std::collections::{BTreeMap, HashMap};

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PatternKey, PatternTable, Slot};
use crate::catalog::{Catalog, Combination, Product, Provenance};
use crate::error::{Error, Result};

/// Candidate generation algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Random,
    Cid,
    Pattern,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Random, Method::Cid, Method::Pattern];

    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Cid => "cid-based",
            Method::Pattern => "pattern",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Method::Random),
            "cid" | "cid-based" | "cid_based" => Ok(Method::Cid),
            "pattern" => Ok(Method::Pattern),
            other => Err(Error::invalid("selection method", other.to_string())),
        }
    }
}

fn topic_products<'a>(catalog: &'a Catalog, topic: &'a str) -> Vec<&'a Product> {
    catalog.in_topic(topic).collect()
}

/// Uniform sampling of distinct products within a topic.
pub fn select_random(
    catalog: &Catalog,
    topic: &str,
    size: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<Combination>> {
    let pool = topic_products(catalog, topic);
    if size < 2 || pool.len() < size {
        return Err(Error::Insufficient(format!(
            "topic `{topic}` has {} products, need {size} (size >= 2)",
            pool.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let ids = rand::seq::index::sample(&mut rng, pool.len(), size)
                .into_iter()
                .map(|i| pool[i].id.clone())
                .collect();
            Combination::new(ids, topic, Provenance::Random)
        })
        .collect())
}

/// Each slot drawn from a different detailed category within the topic.
pub fn select_cid(
    catalog: &Catalog,
    topic: &str,
    size: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<Combination>> {
    let mut by_cid: BTreeMap<&str, Vec<&Product>> = BTreeMap::new();
    for p in catalog.in_topic(topic) {
        by_cid.entry(&p.cid).or_default().push(p);
    }
    let groups: Vec<&Vec<&Product>> = by_cid.values().collect();
    if size < 2 || groups.len() < size {
        return Err(Error::Insufficient(format!(
            "topic `{topic}` has {} distinct cids, need {size} (size >= 2)",
            groups.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let ids = rand::seq::index::sample(&mut rng, groups.len(), size)
                .into_iter()
                .map(|g| {
                    groups[g]
                        .choose(&mut rng)
                        .expect("non-empty group")
                        .id
                        .clone()
                })
                .collect();
            Combination::new(ids, topic, Provenance::CidBased)
        })
        .collect())
}

struct Candidate<'a> {
    key: &'a PatternKey,
    support: usize,
    pools: Vec<Vec<&'a Product>>,
}

fn satisfiable<'a>(
    key: &'a PatternKey,
    support: usize,
    by_slot: &HashMap<Slot, Vec<&'a Product>>,
) -> Option<Candidate<'a>> {
    let mut need: HashMap<&Slot, usize> = HashMap::new();
    for s in key.slots() {
        *need.entry(s).or_default() += 1;
    }
    let ok = need
        .iter()
        .all(|(s, k)| by_slot.get(*s).map_or(0, Vec::len) >= *k);
    ok.then(|| Candidate {
        key,
        support,
        pools: key.slots().iter().map(|s| by_slot[s].clone()).collect(),
    })
}

/// Support-weighted pattern draw, then one uniform product per slot.
pub fn select_pattern(
    catalog: &Catalog,
    table: &PatternTable,
    topic: &str,
    n: usize,
    seed: u64,
) -> Result<Vec<Combination>> {
    let mut by_slot: HashMap<Slot, Vec<&Product>> = HashMap::new();
    for p in catalog.in_topic(topic) {
        let slot = Slot {
            cid: p.cid.clone(),
            word: p.top_word().unwrap_or_default().to_string(),
        };
        by_slot.entry(slot).or_default().push(p);
    }
    let candidates: Vec<Candidate> = table
        .patterns(topic)
        .iter()
        .filter_map(|p| satisfiable(&p.key, p.support, &by_slot))
        .collect();
    if candidates.is_empty() {
        return Err(Error::Insufficient(format!(
            "no satisfiable attribute pattern for topic `{topic}`"
        )));
    }
    let weights = WeightedIndex::new(candidates.iter().map(|c| c.support))
        .map_err(|e| Error::invalid("pattern supports", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let c = &candidates[weights.sample(&mut rng)];
        let mut ids: Vec<String> = Vec::with_capacity(c.key.len());
        for pool in &c.pools {
            let free: Vec<&&Product> = pool.iter().filter(|p| !ids.contains(&p.id)).collect();
            ids.push(free.choose(&mut rng).expect("satisfiable slot").id.clone());
        }
        out.push(Combination {
            products: ids,
            topic: topic.to_string(),
            provenance: Provenance::Pattern,
            pattern: Some(c.key.clone()),
        });
    }
    Ok(out)
}
