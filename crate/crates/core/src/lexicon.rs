//! Lexical categories, tokenization and per-tweet category matching.

use std::collections::{BTreeSet, HashMap};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::TweetRecord;

/// The shipped category definitions (intensifiers, uncertainty words and
/// pronouns with their sub-categories).
pub const DEFAULT_LEXICONS: &str = include_str!("../data/lexicons.toml");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconEntry {
    Token(String),
    Sequence(Vec<String>),
    /// Hyphenated suffix, stored with its leading `-`.
    Suffix(String),
    Char(char),
}

impl LexiconEntry {
    /// Parses the config notation: `word`, `seq:a b`, `suf:-x`, `chr:!`.
    pub fn parse(raw: &str) -> std::result::Result<Self, String> {
        let raw = normalize_apostrophes(raw.trim()).to_lowercase();
        if let Some(seq) = raw.strip_prefix("seq:") {
            let tokens: Vec<String> = seq.split_whitespace().map(str::to_string).collect();
            if tokens.len() < 2 {
                return Err(format!("sequence `{seq}` needs at least two tokens"));
            }
            Ok(LexiconEntry::Sequence(tokens))
        } else if let Some(suffix) = raw.strip_prefix("suf:") {
            let suffix = suffix.trim();
            if !suffix.starts_with('-') || suffix.len() < 2 || suffix.chars().any(char::is_whitespace) {
                return Err(format!("suffix `{suffix}` must look like `-ass`"));
            }
            Ok(LexiconEntry::Suffix(suffix.to_string()))
        } else if let Some(pattern) = raw.strip_prefix("chr:") {
            let mut chars = pattern.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(LexiconEntry::Char(c)),
                _ => Err(format!("character pattern `{pattern}` must be a single character")),
            }
        } else if raw.is_empty() || raw.chars().any(char::is_whitespace) {
            Err(format!("token `{raw}` must be non-empty without whitespace (use `seq:` for phrases)"))
        } else {
            Ok(LexiconEntry::Token(raw))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalCategory {
    pub id: String,
    pub display_name: String,
    pub parent: Option<String>,
    pub entries: Vec<LexiconEntry>,
    /// Reported with the tweet-level statistic only.
    pub t1_only: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCategory {
    display_name: Option<String>,
    parent: Option<String>,
    #[serde(default)]
    entries: Vec<String>,
    #[serde(default)]
    t1_only: bool,
}

/// Parses a lexicon config. Categories keep their file order.
pub fn load_lexicons(source: &str) -> Result<Vec<LexicalCategory>> {
    let table: toml::Table = toml::from_str(source).map_err(|e| Error::Lexicon {
        location: "config".into(),
        message: e.to_string(),
    })?;
    let mut categories = Vec::with_capacity(table.len());
    for (id, value) in table {
        let location = format!("category `{id}`");
        let raw: RawCategory = value.try_into().map_err(|e: toml::de::Error| Error::Lexicon {
            location: location.clone(),
            message: e.to_string(),
        })?;
        let entries = raw
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                LexiconEntry::parse(e).map_err(|message| Error::Lexicon {
                    location: format!("{location}, entry {}", i + 1),
                    message,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        categories.push(LexicalCategory {
            display_name: raw.display_name.unwrap_or_else(|| id.clone()),
            id,
            parent: raw.parent,
            entries,
            t1_only: raw.t1_only,
        });
    }
    Ok(categories)
}

pub fn default_lexicons() -> Vec<LexicalCategory> {
    load_lexicons(DEFAULT_LEXICONS).expect("shipped lexicon config is valid")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
    pub raw_text: String,
}

fn normalize_apostrophes(text: &str) -> String {
    text.replace(['\u{2019}', '\u{2018}', '\u{02BC}', '\u{FF07}'], "'")
}

fn is_joiner(c: char) -> bool {
    c == '\'' || c == '-'
}

/// Lowercase word tokens. URLs, @-mentions and #-hashtags are dropped;
/// apostrophes and hyphens between letters stay inside the token.
pub fn tokenize(text: &str) -> TokenStream {
    let normalized = normalize_apostrophes(text).to_lowercase();
    let mut tokens = Vec::new();
    for chunk in normalized.split_whitespace() {
        let bare = chunk.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '@' && c != '#');
        if bare.starts_with("http") || bare.starts_with("www.") {
            continue;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == '@' || c == '#' {
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
            } else if c.is_alphanumeric() {
                let start = i;
                i += 1;
                while i < chars.len() {
                    if chars[i].is_alphanumeric() {
                        i += 1;
                    } else if is_joiner(chars[i]) && i + 1 < chars.len() && chars[i + 1].is_alphanumeric() {
                        i += 2;
                    } else {
                        break;
                    }
                }
                tokens.push(chars[start..i].iter().collect());
            } else {
                i += 1;
            }
        }
    }
    TokenStream {
        tokens,
        raw_text: text.to_string(),
    }
}

/// Category indices matched by one text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MatchSet {
    bits: Vec<u64>,
}

impl MatchSet {
    fn with_capacity(n: usize) -> Self {
        MatchSet {
            bits: vec![0; n.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, idx: usize) {
        let word = idx / 64;
        if word >= self.bits.len() {
            self.bits.resize(word + 1, 0);
        }
        self.bits[word] |= 1 << (idx % 64);
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.bits.get(idx / 64).is_some_and(|w| w & (1 << (idx % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b))
    }
}

/// Validated categories with lookup tables for matching.
#[derive(Debug, Clone)]
pub struct Lexicon {
    categories: Vec<LexicalCategory>,
    parent: Vec<Option<usize>>,
    by_token: HashMap<String, Vec<usize>>,
    sequences: Vec<(Vec<String>, usize)>,
    suffixes: Vec<(String, usize)>,
    chars: Vec<(char, usize)>,
}

impl Lexicon {
    /// Checks id uniqueness and parent links (known, acyclic, depth 1).
    pub fn new(categories: Vec<LexicalCategory>) -> Result<Self> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, cat) in categories.iter().enumerate() {
            if index.insert(cat.id.as_str(), i).is_some() {
                return Err(Error::Lexicon {
                    location: format!("category `{}`", cat.id),
                    message: "duplicate category id".into(),
                });
            }
        }
        let mut parent = Vec::with_capacity(categories.len());
        for cat in &categories {
            let p = match &cat.parent {
                None => None,
                Some(p) => {
                    let err = |message: &str| Error::Lexicon {
                        location: format!("category `{}`", cat.id),
                        message: message.to_string(),
                    };
                    let &pi = index.get(p.as_str()).ok_or_else(|| err(&format!("unknown parent `{p}`")))?;
                    if categories[pi].parent.is_some() {
                        return Err(err(&format!("parent `{p}` is itself a sub-category")));
                    }
                    Some(pi)
                }
            };
            parent.push(p);
        }

        let mut by_token: HashMap<String, Vec<usize>> = HashMap::new();
        let mut sequences = Vec::new();
        let mut suffixes = Vec::new();
        let mut chars = Vec::new();
        for (i, cat) in categories.iter().enumerate() {
            for entry in &cat.entries {
                match entry {
                    LexiconEntry::Token(t) => by_token.entry(t.clone()).or_default().push(i),
                    LexiconEntry::Sequence(s) => sequences.push((s.clone(), i)),
                    LexiconEntry::Suffix(s) => suffixes.push((s.clone(), i)),
                    LexiconEntry::Char(c) => chars.push((*c, i)),
                }
            }
        }
        Ok(Lexicon {
            categories,
            parent,
            by_token,
            sequences,
            suffixes,
            chars,
        })
    }

    pub fn from_config(source: &str) -> Result<Self> {
        Self::new(load_lexicons(source)?)
    }

    pub fn default_lexicon() -> Self {
        Self::new(default_lexicons()).expect("shipped lexicon config is valid")
    }

    pub fn categories(&self) -> &[LexicalCategory] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.id == id)
    }

    pub fn parent_of(&self, idx: usize) -> Option<usize> {
        self.parent[idx]
    }

    pub fn match_tokens(&self, stream: &TokenStream) -> MatchSet {
        let mut set = MatchSet::with_capacity(self.categories.len());
        for token in &stream.tokens {
            if let Some(cats) = self.by_token.get(token) {
                cats.iter().for_each(|&c| set.insert(c));
            }
            for (suffix, c) in &self.suffixes {
                if token.len() > suffix.len() && token.ends_with(suffix.as_str()) {
                    set.insert(*c);
                }
            }
        }
        for (seq, c) in &self.sequences {
            if stream.tokens.windows(seq.len()).any(|w| w == seq.as_slice()) {
                set.insert(*c);
            }
        }
        if !self.chars.is_empty() {
            let lowered = stream.raw_text.to_lowercase();
            for (ch, c) in &self.chars {
                if lowered.contains(*ch) {
                    set.insert(*c);
                }
            }
        }
        let matched: Vec<usize> = set.iter().collect();
        for c in matched {
            if let Some(p) = self.parent[c] {
                set.insert(p);
            }
        }
        set
    }

    pub fn match_text(&self, text: &str) -> MatchSet {
        self.match_tokens(&tokenize(text))
    }

    pub fn ids<'a>(&'a self, set: &MatchSet) -> BTreeSet<&'a str> {
        set.iter().map(|i| self.categories[i].id.as_str()).collect()
    }
}

/// Ids of every category the tweet's text matches.
pub fn match_categories(tweet: &TweetRecord, lexicon: &Lexicon) -> BTreeSet<String> {
    let set = lexicon.match_text(&tweet.text);
    lexicon.ids(&set).into_iter().map(str::to_string).collect()
}
