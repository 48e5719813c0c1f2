//! Stance communities in tweet corpora and how they differ.
//!
//! The pipeline finds two competing communities from a handful of seed
//! hashtags, then compares them:
//!
//! * [`ingest`] reads JSON Lines corpora, keeps on-topic tweets and drops
//!   repeated texts.
//! * [`hashtag_graph`] and [`propagation`] spread seed valences over the
//!   hashtag co-occurrence graph and label each user pro, anti or neither.
//! * [`lexicon`] and [`lingstats`] measure how often each community uses
//!   intensifiers, pronouns and uncertainty words, with z-tests.
//! * [`netmetrics`] measures density, EI index and echo-chamberness on the
//!   mention, retweet and reply networks.
//! * [`synth`] generates corpora with known answers for end-to-end checks.

pub mod error;
pub mod hashtag_graph;
pub mod ingest;
pub mod lexicon;
pub mod lingstats;
pub mod netmetrics;
pub mod pipeline;
pub mod propagation;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use hashtag_graph::{build_cooccurrence, HashtagGraph, Seeds};
pub use ingest::{dedupe, lemma_filter, parse_corpus, Corpus, TweetRecord};
pub use lexicon::{Lexicon, MatchSet};
pub use netmetrics::{build_networks, CommNetwork, GroupNetworkMetrics, NetworkKind};
pub use propagation::{propagate, PropagationConfig, Stance, StanceAssignment};
