//! In-memory pipeline stages shared by the CLI and the tests.

use std::collections::BTreeMap;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hashtag_graph::{build_cooccurrence, HashtagGraph, Seeds};
use crate::ingest::Corpus;
use crate::lexicon::Lexicon;
use crate::lingstats::{analyze, CategoryStats, GroupMatches, StatsConfig};
use crate::netmetrics::{build_networks, NetworkKind, Networks, PartialNetworkMetrics};
use crate::propagation::{propagate_with, Propagation, PropagationConfig, Stance, StanceAssignment};

#[derive(Debug, Clone)]
pub struct StanceOutcome {
    /// Co-occurrence graph before propagation, with seeds applied.
    pub seeded: HashtagGraph,
    pub propagation: Propagation,
    pub stances: StanceAssignment,
    /// Seeds that did not occur in the corpus.
    pub missing_seeds: Vec<String>,
}

/// Co-occurrence graph, seeding, propagation and per-user stances.
pub fn detect_stances(corpus: &Corpus, seeds: &Seeds, config: &PropagationConfig) -> Result<StanceOutcome> {
    let mut seeded = build_cooccurrence(corpus);
    let missing_seeds = seeded.apply_seeds(seeds)?;
    let propagation = propagate_with(&seeded, config)?;
    info!(
        "propagation finished after {} sweeps (slack {}), {} of {} hashtags valenced",
        propagation.state.pass() + 1,
        propagation.state.slack(),
        propagation.graph.valences().len(),
        propagation.graph.node_count()
    );
    let stances = StanceAssignment::from_corpus(corpus, propagation.graph.valences());
    Ok(StanceOutcome {
        seeded,
        propagation,
        stances,
        missing_seeds,
    })
}

/// Category matches of the pro and anti authors in `corpus`. Labeled users
/// without tweets in `corpus` are kept so T2 can report them.
pub fn group_matches(corpus: &Corpus, stances: &StanceAssignment, lexicon: &Lexicon) -> (GroupMatches, GroupMatches) {
    let mut pro = GroupMatches::new();
    let mut anti = GroupMatches::new();
    for (user, s) in stances.iter() {
        match s.label {
            Stance::Pro => pro.add_user(user),
            Stance::Anti => anti.add_user(user),
            Stance::Unlabeled => {}
        }
    }
    for tweet in corpus.tweets() {
        let group = match stances.label(&tweet.user_id) {
            Stance::Pro => &mut pro,
            Stance::Anti => &mut anti,
            Stance::Unlabeled => continue,
        };
        group.push(&tweet.user_id, lexicon.match_text(&tweet.text));
    }
    for (name, group) in [("pro", &pro), ("anti", &anti)] {
        let empty = group.users().filter(|(_, t)| t.is_empty()).count();
        if empty > 0 {
            warn!("{empty} {name} users have no tweets in the analyzed corpus");
        }
    }
    (pro, anti)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticReport {
    pub pro_users: usize,
    pub anti_users: usize,
    pub pro_tweets: usize,
    pub anti_tweets: usize,
    pub alpha: f64,
    pub rows: Vec<CategoryStats>,
}

pub fn linguistic_report(
    corpus: &Corpus,
    stances: &StanceAssignment,
    lexicon: &Lexicon,
    config: &StatsConfig,
) -> Result<LinguisticReport> {
    let (pro, anti) = group_matches(corpus, stances, lexicon);
    let rows = analyze(&pro, &anti, lexicon, config)?;
    Ok(LinguisticReport {
        pro_users: pro.user_count(),
        anti_users: anti.user_count(),
        pro_tweets: pro.tweet_count(),
        anti_tweets: anti.tweet_count(),
        alpha: config.alpha,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub networks: BTreeMap<NetworkKind, PartialNetworkMetrics>,
}

impl NetworkReport {
    pub fn compute(networks: &Networks) -> Self {
        NetworkReport {
            networks: networks
                .iter()
                .map(|net| (net.kind(), PartialNetworkMetrics::compute(net)))
                .collect(),
        }
    }
}

pub fn network_report(corpus: &Corpus, stances: &StanceAssignment) -> (Networks, NetworkReport) {
    let networks = build_networks(corpus, stances);
    let report = NetworkReport::compute(&networks);
    (networks, report)
}
