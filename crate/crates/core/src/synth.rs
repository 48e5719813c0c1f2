//! Synthetic two-community corpora with known labels, planted lexical
//! usage rates and planted interaction networks.
//!
//! Tweet texts are built from fixed on-topic templates that match no
//! lexical category, plus one exclusive word for every category that fires
//! on that tweet. Each text carries a running number so no two texts are
//! equal. Users get opaque ids; their groups are only recorded in the
//! ground-truth output.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashtag_graph::Seeds;
use crate::ingest::{Corpus, TweetRecord};
use crate::lexicon::{Lexicon, LexiconEntry};
use crate::netmetrics::NetworkKind;
use crate::propagation::Stance;

const TEMPLATES: [&str; 6] = [
    "thoughts on vacc policy",
    "new vaccine study out today",
    "reading about vaccination news",
    "vaccine update from the clinic",
    "vaxx debate again",
    "latest vaccines report",
];

/// Within-group interaction probability, shared or per group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRate {
    Same(f64),
    PerGroup { pro: f64, anti: f64 },
}

impl GroupRate {
    pub fn for_group(self, group: Stance) -> f64 {
        match (self, group) {
            (GroupRate::Same(p), _) => p,
            (GroupRate::PerGroup { pro, .. }, Stance::Pro) => pro,
            (GroupRate::PerGroup { anti, .. }, _) => anti,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionRates {
    /// Probability of an edge from a user to each member of their own group.
    pub p_in: GroupRate,
    /// Probability of an edge from a user to each member of the other group.
    pub p_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub users_per_group: usize,
    pub tweets_per_user: usize,
    /// Chance that a tweet carries one of its author's group seed hashtags.
    pub seed_hashtag_rate: f64,
    /// Number of neutral hashtags shared by both groups.
    pub shared_hashtag_vocab: usize,
    #[serde(default = "default_shared_rate")]
    pub shared_hashtag_rate: f64,
    /// Per-group non-seed hashtags that only co-occur within the group.
    #[serde(default = "default_group_vocab")]
    pub group_hashtag_vocab: usize,
    #[serde(default = "default_group_rate")]
    pub group_hashtag_rate: f64,
    #[serde(default = "default_seed_hashtags")]
    pub seed_hashtags: BTreeMap<Stance, Vec<String>>,
    /// Group to category id to per-tweet probability.
    #[serde(default)]
    pub category_rates: BTreeMap<Stance, BTreeMap<String, f64>>,
    #[serde(default)]
    pub networks: BTreeMap<NetworkKind, InteractionRates>,
    pub rng_seed: u64,
}

fn default_shared_rate() -> f64 {
    0.5
}

fn default_group_vocab() -> usize {
    5
}

fn default_group_rate() -> f64 {
    0.2
}

fn default_seed_hashtags() -> BTreeMap<Stance, Vec<String>> {
    BTreeMap::from([
        (Stance::Pro, vec!["vaccineswork".to_string(), "vaccinessavelives".to_string()]),
        (Stance::Anti, vec!["learntherisk".to_string(), "vaccineinjury".to_string()]),
    ])
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            users_per_group: 100,
            tweets_per_user: 20,
            seed_hashtag_rate: 0.3,
            shared_hashtag_vocab: 10,
            shared_hashtag_rate: default_shared_rate(),
            group_hashtag_vocab: default_group_vocab(),
            group_hashtag_rate: default_group_rate(),
            seed_hashtags: default_seed_hashtags(),
            category_rates: BTreeMap::new(),
            networks: BTreeMap::new(),
            rng_seed: 0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::SynthParams(m));
        if self.users_per_group == 0 || self.tweets_per_user == 0 {
            return err("users_per_group and tweets_per_user must be positive".into());
        }
        let mut probabilities = vec![
            ("seed_hashtag_rate".to_string(), self.seed_hashtag_rate),
            ("shared_hashtag_rate".to_string(), self.shared_hashtag_rate),
            ("group_hashtag_rate".to_string(), self.group_hashtag_rate),
        ];
        for (group, rates) in &self.category_rates {
            if *group == Stance::Unlabeled {
                return err("category_rates keys must be `pro` or `anti`".into());
            }
            for (cat, &p) in rates {
                probabilities.push((format!("category_rates.{group}.{cat}"), p));
            }
        }
        for (kind, rates) in &self.networks {
            probabilities.push((format!("networks.{kind}.p_out"), rates.p_out));
            for group in [Stance::Pro, Stance::Anti] {
                probabilities.push((format!("networks.{kind}.p_in.{group}"), rates.p_in.for_group(group)));
            }
        }
        for (name, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return err(format!("{name} = {p} is not a probability"));
            }
        }
        for group in [Stance::Pro, Stance::Anti] {
            match self.seed_hashtags.get(&group) {
                Some(tags) if !tags.is_empty() => {}
                _ => return err(format!("seed_hashtags.{group} must list at least one hashtag")),
            }
        }
        if self.shared_hashtag_rate > 0.0 && self.shared_hashtag_vocab == 0 {
            return err("shared_hashtag_rate > 0 needs shared_hashtag_vocab > 0".into());
        }
        if self.group_hashtag_rate > 0.0 && self.group_hashtag_vocab == 0 {
            return err("group_hashtag_rate > 0 needs group_hashtag_vocab > 0".into());
        }
        Ok(())
    }

    /// The analyst-side seed file matching the generated seed hashtags.
    pub fn seeds(&self) -> Seeds {
        self.seed_hashtags
            .iter()
            .flat_map(|(group, tags)| {
                let v = if *group == Stance::Pro { 1.0 } else { -1.0 };
                tags.iter().map(move |t| (t.clone(), v))
            })
            .collect()
    }
}

/// Everything the generator knows and the pipeline must not read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub users: BTreeMap<String, Stance>,
    pub params: SynthParams,
    pub edges: BTreeMap<NetworkKind, Vec<(String, String)>>,
}

impl Truth {
    pub fn group_of(&self, user: &str) -> Option<Stance> {
        self.users.get(user).copied()
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub corpus: Corpus,
    pub truth: Truth,
}

impl SynthOutput {
    pub fn write_truth<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.truth)?;
        Ok(())
    }
}

/// Words (or sequences, or characters) that trigger exactly one category
/// plus its parent group.
fn exclusive_vocabulary(lexicon: &Lexicon, category: usize) -> Vec<String> {
    let mut expected = vec![category];
    expected.extend(lexicon.parent_of(category));
    expected.sort_unstable();
    lexicon.categories()[category]
        .entries
        .iter()
        .map(|entry| match entry {
            LexiconEntry::Token(t) => t.clone(),
            LexiconEntry::Sequence(s) => s.join(" "),
            LexiconEntry::Char(c) => c.to_string(),
            LexiconEntry::Suffix(s) => format!("big{s}"),
        })
        .filter(|word| {
            let matched: Vec<usize> = lexicon.match_text(word).iter().collect();
            matched == expected
        })
        .collect()
}

pub fn generate(params: &SynthParams) -> Result<SynthOutput> {
    generate_with_lexicon(params, &Lexicon::default_lexicon())
}

pub fn generate_with_lexicon(params: &SynthParams, lexicon: &Lexicon) -> Result<SynthOutput> {
    params.validate()?;

    let mut vocab: BTreeMap<Stance, Vec<(f64, Vec<String>)>> = BTreeMap::new();
    for (&group, rates) in &params.category_rates {
        let mut per_group = Vec::new();
        for (cat, &rate) in rates {
            let idx = lexicon
                .index_of(cat)
                .ok_or_else(|| Error::SynthParams(format!("unknown category `{cat}`")))?;
            let words = exclusive_vocabulary(lexicon, idx);
            if words.is_empty() && rate > 0.0 {
                return Err(Error::SynthParams(format!("category `{cat}` has no exclusive vocabulary")));
            }
            per_group.push((rate, words));
        }
        vocab.insert(group, per_group);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let n = params.users_per_group;
    let mut groups: Vec<Stance> = std::iter::repeat_n(Stance::Pro, n)
        .chain(std::iter::repeat_n(Stance::Anti, n))
        .collect();
    groups.shuffle(&mut rng);
    let user_ids: Vec<String> = (0..2 * n).map(|i| format!("u{i:05}")).collect();

    let mut tweets: Vec<TweetRecord> = Vec::with_capacity(2 * n * params.tweets_per_user);
    let mut by_user: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    let mut counter = 0usize;
    let mut new_tweet = |rng: &mut ChaCha8Rng, user: usize, extra_words: &[String], tags: Vec<String>| {
        let mut text = format!("{} {}", TEMPLATES[rng.random_range(0..TEMPLATES.len())], counter);
        for w in extra_words {
            text.push(' ');
            text.push_str(w);
        }
        for t in &tags {
            text.push_str(" #");
            text.push_str(t);
        }
        let record = TweetRecord {
            tweet_id: format!("t{counter:08}"),
            user_id: user_ids[user].clone(),
            text,
            created_at: None,
            hashtags: tags,
            retweet_of_user: None,
            reply_to_user: None,
            mentioned_users: Vec::new(),
        };
        counter += 1;
        record
    };

    for user in 0..2 * n {
        let group = groups[user];
        let group_prefix = if group == Stance::Pro { "pro" } else { "anti" };
        for _ in 0..params.tweets_per_user {
            let mut words = Vec::new();
            for (rate, choices) in vocab.get(&group).into_iter().flatten() {
                if rng.random_bool(*rate) {
                    words.push(choices.choose(&mut rng).expect("non-empty vocabulary").clone());
                }
            }
            let mut tags = Vec::new();
            if rng.random_bool(params.seed_hashtag_rate) {
                tags.push(params.seed_hashtags[&group].choose(&mut rng).unwrap().clone());
            }
            if params.group_hashtag_vocab > 0 && rng.random_bool(params.group_hashtag_rate) {
                tags.push(format!("{group_prefix}side{}", rng.random_range(0..params.group_hashtag_vocab)));
            }
            if params.shared_hashtag_vocab > 0 && rng.random_bool(params.shared_hashtag_rate) {
                tags.push(format!("topic{}", rng.random_range(0..params.shared_hashtag_vocab)));
            }
            let record = new_tweet(&mut rng, user, &words, tags);
            by_user[user].push(tweets.len());
            tweets.push(record);
        }
    }

    let mut planted: BTreeMap<NetworkKind, Vec<(String, String)>> = BTreeMap::new();
    for (&kind, rates) in &params.networks {
        let edges = planted.entry(kind).or_default();
        for src in 0..2 * n {
            let p_in = rates.p_in.for_group(groups[src]);
            for dst in 0..2 * n {
                if src == dst {
                    continue;
                }
                let p = if groups[src] == groups[dst] { p_in } else { rates.p_out };
                if !rng.random_bool(p) {
                    continue;
                }
                edges.push((user_ids[src].clone(), user_ids[dst].clone()));
                let target = user_ids[dst].clone();
                match kind {
                    NetworkKind::Mention => {
                        let &t = by_user[src].choose(&mut rng).unwrap();
                        tweets[t].mentioned_users.push(target);
                    }
                    NetworkKind::Retweet | NetworkKind::Reply => {
                        let slot = |t: &TweetRecord| match kind {
                            NetworkKind::Retweet => t.retweet_of_user.is_none(),
                            _ => t.reply_to_user.is_none(),
                        };
                        let free: Vec<usize> = by_user[src].iter().copied().filter(|&t| slot(&tweets[t])).collect();
                        let t = match free.choose(&mut rng) {
                            Some(&t) => t,
                            None => {
                                let record = new_tweet(&mut rng, src, &[], Vec::new());
                                by_user[src].push(tweets.len());
                                tweets.push(record);
                                tweets.len() - 1
                            }
                        };
                        if kind == NetworkKind::Retweet {
                            tweets[t].retweet_of_user = Some(target);
                        } else {
                            tweets[t].reply_to_user = Some(target);
                        }
                    }
                }
            }
        }
    }

    let users = user_ids.iter().cloned().zip(groups.iter().copied()).collect();
    Ok(SynthOutput {
        corpus: Corpus::from_records(tweets)?,
        truth: Truth {
            users,
            params: params.clone(),
            edges: planted,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{lemma_filter, write_jsonl, DEFAULT_LEMMAS};

    #[test]
    fn templates_are_on_topic_and_neutral() {
        let lex = Lexicon::default_lexicon();
        for t in TEMPLATES {
            assert!(lex.match_text(t).is_empty(), "{t}");
            assert!(lex.match_text(&format!("{t} 123")).is_empty(), "{t}");
        }
    }

    #[test]
    fn exclusive_vocabulary_is_exclusive() {
        let lex = Lexicon::default_lexicon();
        let amp = lex.index_of("amplifiers").unwrap();
        let words = exclusive_vocabulary(&lex, amp);
        assert!(words.contains(&"really".to_string()));
        assert!(words.contains(&"big-ass".to_string()));
        assert!(!words.contains(&"most".to_string()), "most is also a quantifier");
        assert!(!words.contains(&"fucking".to_string()), "fucking is also a swear word");
        let excl = lex.index_of("exclamation").unwrap();
        assert_eq!(exclusive_vocabulary(&lex, excl), vec!["!"]);
        let inter = lex.index_of("interjections").unwrap();
        assert!(exclusive_vocabulary(&lex, inter).contains(&"uh oh".to_string()));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut p = SynthParams { seed_hashtag_rate: 1.5, ..SynthParams::default() };
        assert!(generate(&p).is_err());
        p.seed_hashtag_rate = 0.3;
        p.category_rates.insert(Stance::Pro, BTreeMap::from([("amplifiers".to_string(), -0.1)]));
        assert!(generate(&p).is_err());
        p.category_rates.insert(Stance::Pro, BTreeMap::from([("nope".to_string(), 0.1)]));
        assert!(generate(&p).is_err());
    }

    #[test]
    fn zero_rate_plants_nothing() {
        let p = SynthParams {
            users_per_group: 20,
            tweets_per_user: 10,
            category_rates: BTreeMap::from([
                (Stance::Pro, BTreeMap::from([("amplifiers".to_string(), 0.0)])),
                (Stance::Anti, BTreeMap::from([("amplifiers".to_string(), 0.0)])),
            ]),
            ..SynthParams::default()
        };
        let out = generate(&p).unwrap();
        let lex = Lexicon::default_lexicon();
        assert!(out.corpus.tweets().iter().all(|t| lex.match_text(&t.text).is_empty()));
        assert_eq!(lemma_filter(&out.corpus, &DEFAULT_LEMMAS), out.corpus);
    }

    #[test]
    fn fixed_seed_is_byte_identical() {
        let p = SynthParams {
            users_per_group: 15,
            tweets_per_user: 5,
            networks: BTreeMap::from([(
                NetworkKind::Retweet,
                InteractionRates { p_in: GroupRate::Same(0.2), p_out: 0.05 },
            )]),
            rng_seed: 99,
            ..SynthParams::default()
        };
        let dump = |o: &SynthOutput| {
            let mut buf = Vec::new();
            write_jsonl(&o.corpus, &mut buf).unwrap();
            o.write_truth(&mut buf).unwrap();
            buf
        };
        let a = generate(&p).unwrap();
        let b = generate(&p).unwrap();
        assert_eq!(dump(&a), dump(&b));
        let c = generate(&SynthParams { rng_seed: 100, ..p }).unwrap();
        assert_ne!(dump(&a), dump(&c));
    }

    #[test]
    fn seed_rate_concentrates() {
        let p = SynthParams {
            users_per_group: 100,
            tweets_per_user: 50,
            seed_hashtag_rate: 0.5,
            ..SynthParams::default()
        };
        let out = generate(&p).unwrap();
        for group in [Stance::Pro, Stance::Anti] {
            let seeds = &p.seed_hashtags[&group];
            let (mut total, mut tagged) = (0usize, 0usize);
            for t in out.corpus.tweets() {
                if out.truth.group_of(&t.user_id) == Some(group) {
                    total += 1;
                    tagged += t.hashtags.iter().any(|h| seeds.contains(h)) as usize;
                }
            }
            let rate = tagged as f64 / total as f64;
            assert!((rate - 0.5).abs() <= 0.05, "{group}: {rate}");
        }
    }

    #[test]
    fn planted_edges_appear_in_records() {
        let p = SynthParams {
            users_per_group: 10,
            tweets_per_user: 2,
            networks: BTreeMap::from([
                (NetworkKind::Reply, InteractionRates { p_in: GroupRate::Same(0.5), p_out: 0.1 }),
                (NetworkKind::Mention, InteractionRates { p_in: GroupRate::PerGroup { pro: 0.3, anti: 0.6 }, p_out: 0.0 }),
            ]),
            ..SynthParams::default()
        };
        let out = generate(&p).unwrap();
        let replies: usize = out.corpus.tweets().iter().filter(|t| t.reply_to_user.is_some()).count();
        assert_eq!(replies, out.truth.edges[&NetworkKind::Reply].len());
        // more than two replies per user forces extra tweets
        assert!(out.corpus.len() >= 40);
        for (a, b) in &out.truth.edges[&NetworkKind::Mention] {
            assert_eq!(out.truth.group_of(a), out.truth.group_of(b));
        }
    }
}
