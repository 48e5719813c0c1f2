//! Corpus ingestion: JSON Lines parsing, topical lemma filtering and
//! unique-text deduplication.
//!
//! One record per line:
//!
//! ```json
//! {"id":"1","user":"u1","text":"Vaccines work! #VaccinesWork","mentions":["u2"]}
//! ```
//!
//! `id`, `user` and `text` are required. `hashtags` is optional; when it is
//! absent the hashtags are extracted from the text. Every hashtag is
//! lowercased and stripped of its leading `#`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Lemmas used to keep only on-topic tweets.
pub const DEFAULT_LEMMAS: [&str; 2] = ["vacc", "vax"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TweetRecord {
    #[serde(rename = "id")]
    pub tweet_id: String,
    #[serde(rename = "user")]
    pub user_id: String,
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    pub hashtags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retweet_of_user: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reply_to_user: Option<String>,
    #[serde(rename = "mentions")]
    pub mentioned_users: Vec<String>,
}

impl TweetRecord {
    /// A bare record whose hashtags are extracted from `text`.
    pub fn new(tweet_id: impl Into<String>, user_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let hashtags = extract_hashtags(&text);
        TweetRecord {
            tweet_id: tweet_id.into(),
            user_id: user_id.into(),
            text,
            created_at: None,
            hashtags,
            retweet_of_user: None,
            reply_to_user: None,
            mentioned_users: Vec::new(),
        }
    }
}

/// An ordered collection of tweets plus an index from author to tweet
/// positions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    tweets: Vec<TweetRecord>,
    users: BTreeMap<String, Vec<usize>>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate tweet ids. Line numbers in
    /// errors are 1-based record positions.
    pub fn from_records(tweets: Vec<TweetRecord>) -> Result<Self> {
        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(tweets.len());
        for (idx, tweet) in tweets.iter().enumerate() {
            if let Some(first) = seen.insert(tweet.tweet_id.as_str(), idx) {
                return Err(Error::DuplicateTweetId {
                    line: idx + 1,
                    first_line: first + 1,
                    id: tweet.tweet_id.clone(),
                });
            }
        }
        Ok(Self::from_unique(tweets))
    }

    fn from_unique(tweets: Vec<TweetRecord>) -> Self {
        let mut users: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, tweet) in tweets.iter().enumerate() {
            users.entry(tweet.user_id.clone()).or_default().push(idx);
        }
        Corpus { tweets, users }
    }

    pub fn tweets(&self) -> &[TweetRecord] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Author id to positions of that author's tweets, in corpus order.
    pub fn users(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.users
    }

    pub fn user_tweets<'a>(&'a self, user_id: &str) -> impl Iterator<Item = &'a TweetRecord> + 'a {
        self.users
            .get(user_id)
            .into_iter()
            .flatten()
            .map(move |&idx| &self.tweets[idx])
    }

    pub fn into_tweets(self) -> Vec<TweetRecord> {
        self.tweets
    }

    fn retain(&self, mut keep: impl FnMut(&TweetRecord) -> bool) -> Corpus {
        let kept = self.tweets.iter().filter(|t| keep(t)).cloned().collect();
        Corpus::from_unique(kept)
    }
}

/// Pluggable record source. The JSON Lines reader is the only shipped
/// implementation; live API fetchers plug in here with the same schema.
pub trait TweetSource {
    fn fetch(&mut self) -> Result<Corpus>;
}

pub struct JsonlSource<R> {
    reader: R,
}

impl<R: BufRead> JsonlSource<R> {
    pub fn new(reader: R) -> Self {
        JsonlSource { reader }
    }
}

impl<R: BufRead> TweetSource for JsonlSource<R> {
    fn fetch(&mut self) -> Result<Corpus> {
        parse_corpus(&mut self.reader)
    }
}

/// Parses a JSON Lines stream. Blank lines are skipped.
pub fn parse_corpus<R: BufRead>(source: R) -> Result<Corpus> {
    let mut tweets = Vec::new();
    let mut first_line: HashMap<String, usize> = HashMap::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_record(&line, line_no)?;
        if let Some(&first) = first_line.get(&record.tweet_id) {
            return Err(Error::DuplicateTweetId {
                line: line_no,
                first_line: first,
                id: record.tweet_id,
            });
        }
        first_line.insert(record.tweet_id.clone(), line_no);
        tweets.push(record);
    }
    Ok(Corpus::from_unique(tweets))
}

/// Parses one JSON object into a record; `line` is only used for errors.
pub fn parse_record(json: &str, line: usize) -> Result<TweetRecord> {
    let value: Value = serde_json::from_str(json).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(Error::Parse {
            line,
            message: "record is not a JSON object".into(),
        });
    };

    let field_err = |field: &'static str, message: &str| Error::Field {
        line,
        field,
        message: message.to_string(),
    };

    let tweet_id = required_id(&obj, "id", line)?;
    let user_id = required_id(&obj, "user", line)?;
    let text = match obj.get("text") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(field_err("text", "expected a string")),
        None => return Err(field_err("text", "required field is missing")),
    };

    let created_at = match obj.get("created_at") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => {
            if !is_iso8601(s) {
                return Err(field_err("created_at", "not an ISO-8601 timestamp"));
            }
            Some(s.clone())
        }
        Some(_) => return Err(field_err("created_at", "expected a string")),
    };

    let hashtags = match obj.get("hashtags") {
        None | Some(Value::Null) => extract_hashtags(&text),
        Some(Value::Array(items)) => {
            let mut tags = Vec::with_capacity(items.len());
            for item in items {
                let Value::String(raw) = item else {
                    return Err(field_err("hashtags", "expected a list of strings"));
                };
                let tag = normalize_hashtag(raw)
                    .ok_or_else(|| field_err("hashtags", &format!("invalid hashtag `{raw}`")))?;
                tags.push(tag);
            }
            tags
        }
        Some(_) => return Err(field_err("hashtags", "expected a list of strings")),
    };

    let retweet_of_user = optional_id(&obj, "retweet_of_user", line)?;
    let reply_to_user = optional_id(&obj, "reply_to_user", line)?;

    let mentioned_users = match obj.get("mentions") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|item| id_value(item).ok_or_else(|| field_err("mentions", "expected a list of user ids")))
            .collect::<Result<_>>()?,
        Some(_) => return Err(field_err("mentions", "expected a list of user ids")),
    };

    Ok(TweetRecord {
        tweet_id,
        user_id,
        text,
        created_at,
        hashtags,
        retweet_of_user,
        reply_to_user,
        mentioned_users,
    })
}

// Ids may arrive as strings or as bare integers (common in API exports).
fn id_value(value: &Value) -> Option<String> {
    match value {
        Value::String(s) if !s.trim().is_empty() => Some(s.trim().to_string()),
        Value::Number(n) if n.is_u64() || n.is_i64() => Some(n.to_string()),
        _ => None,
    }
}

fn required_id(obj: &Map<String, Value>, field: &'static str, line: usize) -> Result<String> {
    match obj.get(field) {
        None | Some(Value::Null) => Err(Error::Field {
            line,
            field,
            message: "required field is missing".into(),
        }),
        Some(v) => id_value(v).ok_or_else(|| Error::Field {
            line,
            field,
            message: "expected a non-empty string or integer".into(),
        }),
    }
}

fn optional_id(obj: &Map<String, Value>, field: &'static str, line: usize) -> Result<Option<String>> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => id_value(v).map(Some).ok_or_else(|| Error::Field {
            line,
            field,
            message: "expected a non-empty string or integer".into(),
        }),
    }
}

fn is_iso8601(s: &str) -> bool {
    use chrono::{DateTime, NaiveDate, NaiveDateTime};
    DateTime::parse_from_rfc3339(s).is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f").is_ok()
        || NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
}

/// Lowercases and strips leading `#`. Returns `None` for empty tags or tags
/// with interior whitespace or `#`.
pub fn normalize_hashtag(raw: &str) -> Option<String> {
    let tag = raw.trim().trim_start_matches('#').to_lowercase();
    if tag.is_empty() || tag.chars().any(|c| c.is_whitespace() || c == '#') {
        return None;
    }
    Some(tag)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Maximal runs of word characters following `#`, normalized. Repeats are
/// kept.
pub fn extract_hashtags(text: &str) -> Vec<String> {
    let mut tags = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((_, c)) = chars.next() {
        if c != '#' {
            continue;
        }
        let mut tag = String::new();
        while let Some(&(_, next)) = chars.peek() {
            if !is_word_char(next) {
                break;
            }
            tag.push(next);
            chars.next();
        }
        if !tag.is_empty() {
            tags.push(tag.to_lowercase());
        }
    }
    tags
}

/// Writes the corpus in the same JSON Lines schema `parse_corpus` reads.
pub fn write_jsonl<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for tweet in corpus.tweets() {
        serde_json::to_writer(&mut out, tweet)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Keeps tweets whose lowercased text contains at least one lemma as a
/// substring.
pub fn lemma_filter(corpus: &Corpus, lemmas: &[impl AsRef<str>]) -> Corpus {
    let lemmas: Vec<String> = lemmas.iter().map(|l| l.as_ref().to_lowercase()).collect();
    corpus.retain(|tweet| {
        let text = tweet.text.to_lowercase();
        lemmas.iter().any(|lemma| text.contains(lemma.as_str()))
    })
}

/// Trims and collapses internal whitespace runs to one space.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// One tweet per distinct normalized text; the first occurrence wins.
pub fn dedupe(corpus: &Corpus) -> Corpus {
    let mut seen = HashSet::with_capacity(corpus.len());
    corpus.retain(|tweet| seen.insert(normalize_text(&tweet.text)))
}
