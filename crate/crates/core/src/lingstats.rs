//! Per-category usage statistics for two communities and the z-tests that
//! compare them.
//!
//! T1 is the share of a group's tweets matching a category; it is compared
//! with a pooled two-sample z-test for proportions. T2 is the mean over
//! users of each user's matching share; it is compared with an unpooled
//! z-test for the difference in means, using sample standard deviations.
//! All p-values are two-sided.

use std::collections::BTreeMap;

use log::{debug, warn};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, MatchSet};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsConfig {
    pub alpha: f64,
    /// Users with fewer tweets are left out of T2.
    pub min_user_tweets: usize,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            alpha: DEFAULT_ALPHA,
            min_user_tweets: 1,
        }
    }
}

impl StatsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Stats(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Two-sided p-value `2(1 - Φ(|z|))`, computed from the upper tail
/// directly and floored at the smallest positive normal `f64`.
pub fn p_value(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0)
}

/// Table-style rendering: `<.001` below one in a thousand, otherwise up to
/// three decimals without the leading zero.
pub fn format_p(p: f64) -> String {
    if p < 0.001 {
        return "<.001".to_string();
    }
    let s = format!("{p:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.strip_prefix('0').unwrap_or(s).to_string()
}

/// Pooled two-sample z statistic for a difference of proportions.
pub fn z_prop(p1: f64, n1: usize, p2: f64, n2: usize) -> Result<f64> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Stats("z-test for proportions needs non-empty groups".into()));
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let pooled = (p1 * n1f + p2 * n2f) / (n1f + n2f);
    let variance = pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f);
    if variance <= 0.0 {
        return Err(Error::Stats(format!("degenerate pooled proportion {pooled}")));
    }
    Ok((p1 - p2) / variance.sqrt())
}

/// Unpooled z statistic for a difference of means.
pub fn z_means(m1: f64, s1: f64, n1: usize, m2: f64, s2: f64, n2: usize) -> Result<f64> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::Stats("z-test for means needs at least two users per group".into()));
    }
    let variance = s1 * s1 / n1 as f64 + s2 * s2 / n2 as f64;
    if variance <= 0.0 {
        return Err(Error::Stats("zero combined variance".into()));
    }
    Ok((m1 - m2) / variance.sqrt())
}

/// Share of tweets whose match set contains `category`.
pub fn t1(group: &[MatchSet], category: usize) -> Result<f64> {
    if group.is_empty() {
        return Err(Error::Stats("T1 of an empty group is undefined".into()));
    }
    let hits = group.iter().filter(|m| m.contains(category)).count();
    Ok(hits as f64 / group.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T2Summary {
    pub mean: f64,
    /// Sample standard deviation; absent for a single user.
    pub sd: Option<f64>,
    pub n_users: usize,
}

/// Mean over users of each user's matching share. Users with no tweets are
/// skipped with a warning.
pub fn t2<'a>(per_user: impl IntoIterator<Item = (&'a str, &'a [MatchSet])>, category: usize) -> Result<T2Summary> {
    let mut shares = Vec::new();
    for (user, tweets) in per_user {
        if tweets.is_empty() {
            warn!("user `{user}` has no tweets; left out of T2");
            continue;
        }
        let hits = tweets.iter().filter(|m| m.contains(category)).count();
        shares.push(hits as f64 / tweets.len() as f64);
    }
    if shares.is_empty() {
        return Err(Error::Stats("T2 needs at least one user with tweets".into()));
    }
    let n = shares.len() as f64;
    let mean = shares.iter().sum::<f64>() / n;
    let sd = (shares.len() > 1).then(|| {
        let ss: f64 = shares.iter().map(|s| (s - mean) * (s - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    });
    Ok(T2Summary {
        mean,
        sd,
        n_users: shares.len(),
    })
}

/// Match sets of one community, grouped by author.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroupMatches {
    per_user: BTreeMap<String, Vec<MatchSet>>,
}

impl GroupMatches {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, user: &str, matches: MatchSet) {
        self.per_user.entry(user.to_string()).or_default().push(matches);
    }

    /// Registers a user even if they end up with no tweets.
    pub fn add_user(&mut self, user: &str) {
        self.per_user.entry(user.to_string()).or_default();
    }

    pub fn user_count(&self) -> usize {
        self.per_user.len()
    }

    pub fn tweet_count(&self) -> usize {
        self.per_user.values().map(Vec::len).sum()
    }

    pub fn tweets(&self) -> Vec<MatchSet> {
        self.per_user.values().flatten().cloned().collect()
    }

    pub fn users(&self) -> impl Iterator<Item = (&str, &[MatchSet])> {
        self.per_user.iter().map(|(u, m)| (u.as_str(), m.as_slice()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub category_id: String,
    pub display_name: String,
    pub parent: Option<String>,
    pub t1_pro: f64,
    pub t1_anti: f64,
    pub n1_pro: usize,
    pub n1_anti: usize,
    pub z1: Option<f64>,
    pub p1: Option<f64>,
    pub t2_pro: Option<f64>,
    pub t2_anti: Option<f64>,
    pub sd2_pro: Option<f64>,
    pub sd2_anti: Option<f64>,
    pub n2_pro: usize,
    pub n2_anti: usize,
    pub z2: Option<f64>,
    pub p2: Option<f64>,
    pub significant_1: bool,
    pub significant_2: bool,
}

fn eligible_users(group: &GroupMatches, min_tweets: usize) -> Vec<(&str, &[MatchSet])> {
    let mut short = 0usize;
    let users: Vec<_> = group
        .users()
        .filter(|(user, tweets)| {
            if tweets.is_empty() {
                debug!("user `{user}` has no tweets; left out of T2");
                return false;
            }
            if tweets.len() < min_tweets {
                debug!("user `{user}` has {} tweets, below the minimum; left out of T2", tweets.len());
                short += 1;
                return false;
            }
            true
        })
        .collect();
    if short > 0 {
        warn!("{short} users have fewer than {min_tweets} tweets and are left out of T2");
    }
    users
}

/// One row per category, in lexicon order. Undefined tests (degenerate
/// variance, too few users) leave their fields empty.
pub fn analyze(
    pro: &GroupMatches,
    anti: &GroupMatches,
    lexicon: &Lexicon,
    config: &StatsConfig,
) -> Result<Vec<CategoryStats>> {
    config.validate()?;
    if pro.tweet_count() == 0 || anti.tweet_count() == 0 {
        return Err(Error::Stats("both groups need at least one tweet".into()));
    }
    let pro_tweets = pro.tweets();
    let anti_tweets = anti.tweets();
    let pro_users = eligible_users(pro, config.min_user_tweets);
    let anti_users = eligible_users(anti, config.min_user_tweets);

    let mut rows = Vec::with_capacity(lexicon.len());
    for (idx, category) in lexicon.categories().iter().enumerate() {
        let t1_pro = t1(&pro_tweets, idx)?;
        let t1_anti = t1(&anti_tweets, idx)?;
        let z1 = z_prop(t1_pro, pro_tweets.len(), t1_anti, anti_tweets.len()).ok();
        let p1 = z1.map(p_value);

        let (t2_pro, t2_anti) = if category.t1_only {
            (None, None)
        } else {
            (t2(pro_users.iter().copied(), idx).ok(), t2(anti_users.iter().copied(), idx).ok())
        };
        let z2 = match (t2_pro, t2_anti) {
            (Some(a), Some(b)) => match (a.sd, b.sd) {
                (Some(sa), Some(sb)) => z_means(a.mean, sa, a.n_users, b.mean, sb, b.n_users).ok(),
                _ => None,
            },
            _ => None,
        };
        let p2 = z2.map(p_value);

        rows.push(CategoryStats {
            category_id: category.id.clone(),
            display_name: category.display_name.clone(),
            parent: category.parent.clone(),
            t1_pro,
            t1_anti,
            n1_pro: pro_tweets.len(),
            n1_anti: anti_tweets.len(),
            z1,
            p1,
            t2_pro: t2_pro.map(|s| s.mean),
            t2_anti: t2_anti.map(|s| s.mean),
            sd2_pro: t2_pro.and_then(|s| s.sd),
            sd2_anti: t2_anti.and_then(|s| s.sd),
            n2_pro: t2_pro.map_or(0, |s| s.n_users),
            n2_anti: t2_anti.map_or(0, |s| s.n_users),
            z2,
            p2,
            significant_1: p1.is_some_and(|p| p < config.alpha),
            significant_2: p2.is_some_and(|p| p < config.alpha),
        });
    }
    Ok(rows)
}
