//! Seeded label propagation over the hashtag graph, and per-user stance
//! assignment from the propagated valences.
//!
//! Propagation runs in sweeps. Every sweep visits the nodes in a fixed
//! order (descending total incident weight, ties by name). An unlabeled
//! node `n` with `|t|` neighbors, `|t_l|` of them labeled, is labeled when
//! `|t_l| + l >= |t|`, where the slack `l = floor(pass / gamma)` grows by
//! one every `gamma` sweeps. Its valence becomes the edge-weighted mean of
//! its labeled neighbors' valences. Labels written during a sweep are
//! visible to nodes visited later in the same sweep.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashtag_graph::HashtagGraph;
use crate::ingest::{Corpus, TweetRecord};

pub const DEFAULT_GAMMA: u64 = 50;

/// How unlabeled neighbors enter the weighted average.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accumulation {
    /// Only labeled neighbors contribute to score and weight.
    #[default]
    LabeledOnly,
    /// Unlabeled neighbors contribute their weight with an implicit label of
    /// 0, pulling the result toward 0.
    LiteralDilution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagationConfig {
    pub gamma: u64,
    pub accumulation: Accumulation,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            gamma: DEFAULT_GAMMA,
            accumulation: Accumulation::LabeledOnly,
        }
    }
}

/// Pass counter and slack schedule of one propagation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationState {
    gamma: u64,
    pass: u64,
    order: Vec<String>,
}

impl PropagationState {
    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    /// Index of the current (or, after the run, the last) sweep.
    pub fn pass(&self) -> u64 {
        self.pass
    }

    pub fn slack(&self) -> u64 {
        self.pass / self.gamma
    }

    /// Sweep visiting order.
    pub fn order(&self) -> &[String] {
        &self.order
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub graph: HashtagGraph,
    pub state: PropagationState,
    /// Sweep index at which each propagated (non-seed) node got its valence.
    pub labeled_at: BTreeMap<String, u64>,
}

/// Propagates with the default accumulation rule.
pub fn propagate(graph: &HashtagGraph, gamma: u64) -> Result<HashtagGraph> {
    let config = PropagationConfig {
        gamma,
        ..PropagationConfig::default()
    };
    Ok(propagate_with(graph, &config)?.graph)
}

pub fn propagate_with(graph: &HashtagGraph, config: &PropagationConfig) -> Result<Propagation> {
    if config.gamma < 1 {
        return Err(Error::InvalidGamma(config.gamma));
    }
    if graph.seeds().is_empty() {
        return Err(Error::NoSeeds);
    }

    let names: Vec<&str> = graph.nodes().collect();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let adjacency: Vec<Vec<(usize, f64)>> = names
        .iter()
        .map(|n| {
            graph
                .neighbors(n)
                .into_iter()
                .flatten()
                .map(|(m, &w)| (index[m.as_str()], w as f64))
                .collect()
        })
        .collect();
    let mut labels: Vec<Option<f64>> = names.iter().map(|n| graph.valence(n)).collect();

    let strength: Vec<f64> = adjacency.iter().map(|nbrs| nbrs.iter().map(|&(_, w)| w).sum()).collect();
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| {
        strength[b]
            .partial_cmp(&strength[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| names[a].cmp(names[b]))
    });
    let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0) as u64;

    let mut labeled_at = BTreeMap::new();
    let mut pass: u64 = 0;
    loop {
        let slack = pass / config.gamma;
        let mut newly_labeled = 0usize;
        for &node in &order {
            if labels[node].is_some() {
                continue;
            }
            let nbrs = &adjacency[node];
            let labeled = nbrs.iter().filter(|&&(m, _)| labels[m].is_some()).count() as u64;
            if labeled + slack < nbrs.len() as u64 {
                continue;
            }
            let (mut score, mut total) = (0.0, 0.0);
            for &(m, w) in nbrs {
                match (labels[m], config.accumulation) {
                    (Some(v), _) => {
                        score += v * w;
                        total += w;
                    }
                    (None, Accumulation::LiteralDilution) => total += w,
                    (None, Accumulation::LabeledOnly) => {}
                }
            }
            if total > 0.0 {
                labels[node] = Some((score / total).clamp(-1.0, 1.0));
                labeled_at.insert(names[node].to_string(), pass);
                newly_labeled += 1;
            }
        }

        if newly_labeled > 0 {
            pass += 1;
            continue;
        }
        if slack >= max_degree {
            break;
        }
        // Nothing changed, so every sweep until the slack grows would repeat
        // this one exactly.
        pass = (slack + 1) * config.gamma;
    }

    let mut out = graph.clone();
    for (node, label) in labels.iter().enumerate() {
        if let Some(v) = label {
            out.set_valence(names[node], *v);
        }
    }
    Ok(Propagation {
        graph: out,
        state: PropagationState {
            gamma: config.gamma,
            pass,
            order: order.iter().map(|&i| names[i].to_string()).collect(),
        },
        labeled_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Pro,
    Anti,
    Unlabeled,
}

impl Stance {
    pub fn opposite(self) -> Stance {
        match self {
            Stance::Pro => Stance::Anti,
            Stance::Anti => Stance::Pro,
            Stance::Unlabeled => Stance::Unlabeled,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Pro => "pro",
            Stance::Anti => "anti",
            Stance::Unlabeled => "unlabeled",
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pro" => Ok(Stance::Pro),
            "anti" => Ok(Stance::Anti),
            "unlabeled" | "" => Ok(Stance::Unlabeled),
            other => Err(format!("unknown stance `{other}`")),
        }
    }
}

/// Mean valence over every valenced hashtag occurrence in the user's
/// tweets; `None` when no occurrence carries a valence.
pub fn user_valence<'a>(
    user_tweets: impl IntoIterator<Item = &'a TweetRecord>,
    valence: &BTreeMap<String, f64>,
) -> Option<f64> {
    let (mut sum, mut count) = (0.0, 0u64);
    for tweet in user_tweets {
        for tag in &tweet.hashtags {
            if let Some(v) = valence.get(tag) {
                sum += v;
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}

pub fn assign_stance(valence: Option<f64>) -> Stance {
    match valence {
        Some(v) if v > 0.0 => Stance::Pro,
        Some(v) if v < 0.0 => Stance::Anti,
        _ => Stance::Unlabeled,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserStance {
    pub valence: Option<f64>,
    pub label: Stance,
}

/// Per-user valence and stance label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StanceAssignment {
    users: BTreeMap<String, UserStance>,
}

impl StanceAssignment {
    /// Scores every author in the corpus against the valence map.
    pub fn from_corpus(corpus: &Corpus, valence: &BTreeMap<String, f64>) -> Self {
        let users = corpus
            .users()
            .keys()
            .map(|user| {
                let v = user_valence(corpus.user_tweets(user), valence);
                (user.clone(), UserStance { valence: v, label: assign_stance(v) })
            })
            .collect();
        StanceAssignment { users }
    }

    pub fn insert(&mut self, user: impl Into<String>, valence: Option<f64>) {
        self.users.insert(user.into(), UserStance { valence, label: assign_stance(valence) });
    }

    pub fn get(&self, user: &str) -> Option<&UserStance> {
        self.users.get(user)
    }

    /// Label of `user`; unknown users are unlabeled.
    pub fn label(&self, user: &str) -> Stance {
        self.users.get(user).map_or(Stance::Unlabeled, |s| s.label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &UserStance)> {
        self.users.iter()
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn count(&self, stance: Stance) -> usize {
        self.users.values().filter(|s| s.label == stance).count()
    }

    pub fn members(&self, stance: Stance) -> impl Iterator<Item = &str> {
        self.users
            .iter()
            .filter(move |(_, s)| s.label == stance)
            .map(|(u, _)| u.as_str())
    }

    /// CSV `user_id,valence,label`; users without valence get an empty
    /// valence cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["user_id", "valence", "label"])?;
        for (user, s) in &self.users {
            let v = s.valence.map(|v| v.to_string()).unwrap_or_default();
            wtr.write_record([user.as_str(), &v, s.label.as_str()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads the format written by [`StanceAssignment::write_csv`]. Labels
    /// are recomputed from the valence column.
    pub fn read_csv<R: BufRead>(source: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(source);
        let mut assignment = StanceAssignment::default();
        for (idx, record) in rdr.records().enumerate() {
            let record = record?;
            let line = idx + 2;
            let user = record.get(0).filter(|u| !u.is_empty()).ok_or(Error::Field {
                line,
                field: "user_id",
                message: "missing".into(),
            })?;
            let valence = match record.get(1).map(str::trim) {
                None | Some("") => None,
                Some(v) => Some(v.parse::<f64>().map_err(|_| Error::Field {
                    line,
                    field: "valence",
                    message: format!("invalid number `{v}`"),
                })?),
            };
            assignment.insert(user, valence);
        }
        Ok(assignment)
    }
}
