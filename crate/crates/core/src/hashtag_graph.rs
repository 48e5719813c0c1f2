//! Weighted hashtag co-occurrence graph with a partial valence labeling.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use log::warn;

use crate::error::{Error, Result};
use crate::ingest::{normalize_hashtag, Corpus};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HashtagGraph {
    adjacency: BTreeMap<String, BTreeMap<String, u64>>,
    valence: BTreeMap<String, f64>,
    seeds: BTreeSet<String>,
}

impl HashtagGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, tag: &str) {
        if !self.adjacency.contains_key(tag) {
            self.adjacency.insert(tag.to_string(), BTreeMap::new());
        }
    }

    /// Adds `count` to the undirected edge between two distinct tags.
    pub fn add_edge(&mut self, a: &str, b: &str, count: u64) {
        assert_ne!(a, b, "co-occurrence graph has no self-loops");
        if count == 0 {
            return;
        }
        self.add_node(a);
        self.add_node(b);
        *self.adjacency.get_mut(a).unwrap().entry(b.to_string()).or_insert(0) += count;
        *self.adjacency.get_mut(b).unwrap().entry(a.to_string()).or_insert(0) += count;
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.adjacency.contains_key(tag)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Nodes in lexicographic order.
    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.adjacency.keys().map(String::as_str)
    }

    pub fn neighbors(&self, tag: &str) -> Option<&BTreeMap<String, u64>> {
        self.adjacency.get(tag)
    }

    pub fn weight(&self, a: &str, b: &str) -> u64 {
        self.adjacency
            .get(a)
            .and_then(|n| n.get(b))
            .copied()
            .unwrap_or(0)
    }

    /// Each undirected edge once, as `(lo, hi, weight)` with `lo < hi`.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.adjacency.iter().flat_map(|(a, nbrs)| {
            nbrs.iter()
                .filter(move |(b, _)| a.as_str() < b.as_str())
                .map(move |(b, &w)| (a.as_str(), b.as_str(), w))
        })
    }

    pub fn valence(&self, tag: &str) -> Option<f64> {
        self.valence.get(tag).copied()
    }

    pub fn valences(&self) -> &BTreeMap<String, f64> {
        &self.valence
    }

    pub fn is_seed(&self, tag: &str) -> bool {
        self.seeds.contains(tag)
    }

    pub fn seeds(&self) -> &BTreeSet<String> {
        &self.seeds
    }

    /// Sets a non-frozen valence, e.g. during propagation. Seeds are never
    /// overwritten.
    pub(crate) fn set_valence(&mut self, tag: &str, valence: f64) {
        debug_assert!((-1.0..=1.0).contains(&valence));
        if !self.seeds.contains(tag) {
            self.valence.insert(tag.to_string(), valence);
        }
    }

    /// Freezes the given seed valences. Seeds missing from the graph are
    /// added as isolated nodes; their names are returned.
    pub fn apply_seeds(&mut self, seeds: &Seeds) -> Result<Vec<String>> {
        for (tag, &valence) in seeds.iter() {
            if valence != 1.0 && valence != -1.0 {
                return Err(Error::InvalidSeedValence {
                    hashtag: tag.clone(),
                    valence,
                });
            }
        }
        let mut added = Vec::new();
        for (tag, &valence) in seeds.iter() {
            if !self.contains(tag) {
                warn!("seed hashtag `{tag}` does not occur in the corpus; added as an isolated node");
                self.add_node(tag);
                added.push(tag.clone());
            }
            self.valence.insert(tag.clone(), valence);
            self.seeds.insert(tag.clone());
        }
        Ok(added)
    }

    /// Up to `k` neighbors of `anchor` by descending weight, ties broken
    /// lexicographically.
    pub fn top_cooccurring(&self, anchor: &str, k: usize) -> Result<Vec<(String, u64)>> {
        let nbrs = self
            .adjacency
            .get(anchor)
            .ok_or_else(|| Error::UnknownHashtag(anchor.to_string()))?;
        let mut ranked: Vec<(String, u64)> = nbrs.iter().map(|(t, &w)| (t.clone(), w)).collect();
        // BTreeMap iteration is already lexicographic, so a stable sort keeps ties in order.
        ranked.sort_by_key(|r| std::cmp::Reverse(r.1));
        ranked.truncate(k);
        Ok(ranked)
    }

    /// CSV edge list `h1,h2,weight`.
    pub fn write_edges_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["h1", "h2", "weight"])?;
        for (a, b, w) in self.edges() {
            wtr.write_record([a, b, &w.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// CSV `hashtag,valence,is_seed` for every valenced node.
    pub fn write_valences_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["hashtag", "valence", "is_seed"])?;
        for (tag, v) in &self.valence {
            wtr.write_record([tag.as_str(), &v.to_string(), if self.is_seed(tag) { "true" } else { "false" }])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Counts, for every unordered pair of distinct hashtags, the tweets that
/// carry both. Repeated tags within one tweet count once.
pub fn build_cooccurrence(corpus: &Corpus) -> HashtagGraph {
    let mut graph = HashtagGraph::new();
    for tweet in corpus.tweets() {
        let tags: BTreeSet<&str> = tweet.hashtags.iter().map(String::as_str).collect();
        let tags: Vec<&str> = tags.into_iter().collect();
        for (i, a) in tags.iter().enumerate() {
            graph.add_node(a);
            for b in &tags[i + 1..] {
                graph.add_edge(a, b, 1);
            }
        }
    }
    graph
}

/// Hashtag to frozen valence (+1 or -1).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Seeds(BTreeMap<String, f64>);

impl Seeds {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts after normalizing the tag. The valence is checked when the
    /// seeds are applied to a graph.
    pub fn insert(&mut self, tag: &str, valence: f64) -> Result<()> {
        let tag = normalize_hashtag(tag).ok_or_else(|| Error::UnknownHashtag(tag.to_string()))?;
        self.0.insert(tag, valence);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same seeds with every valence sign flipped.
    pub fn negated(&self) -> Seeds {
        Seeds(self.0.iter().map(|(t, v)| (t.clone(), -v)).collect())
    }

    /// Reads `hashtag,valence` lines. Blank lines are skipped, as are lines
    /// starting with `#` that either have no comma or continue with
    /// whitespace, so `#VaccinesWork,1` is still a seed.
    pub fn parse<R: BufRead>(source: R) -> Result<Seeds> {
        let mut seeds = Seeds::new();
        for (idx, line) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            let is_comment = trimmed.starts_with('#')
                && (!trimmed.contains(',') || trimmed[1..].starts_with(|c: char| c.is_whitespace() || c == '#'));
            if trimmed.is_empty() || is_comment {
                continue;
            }
            let parse_err = |message: &str| Error::Parse {
                line: line_no,
                message: message.to_string(),
            };
            let (tag, valence) = trimmed
                .split_once(',')
                .ok_or_else(|| parse_err("expected `hashtag,valence`"))?;
            let valence: f64 = valence
                .trim()
                .parse()
                .map_err(|_| parse_err(&format!("invalid valence `{}`", valence.trim())))?;
            let tag = normalize_hashtag(tag).ok_or_else(|| parse_err(&format!("invalid hashtag `{}`", tag.trim())))?;
            seeds.0.insert(tag, valence);
        }
        Ok(seeds)
    }
}

impl FromIterator<(String, f64)> for Seeds {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Seeds(iter.into_iter().collect())
    }
}
