//! Directed communication networks (mention, retweet, reply) and the
//! community-level measures computed on them: density, reciprocity, EI
//! index and echo-chamberness.
//!
//! Every measure works on distinct directed edges; multiplicity is kept on
//! the network for export but ignored by the measures.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Corpus;
use crate::propagation::{Stance, StanceAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Mention,
    Retweet,
    Reply,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [NetworkKind::Mention, NetworkKind::Retweet, NetworkKind::Reply];

    pub fn as_str(self) -> &'static str {
        match self {
            NetworkKind::Mention => "mention",
            NetworkKind::Retweet => "retweet",
            NetworkKind::Reply => "reply",
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommNetwork {
    kind: NetworkKind,
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    stance: Vec<Stance>,
    edges: BTreeMap<(usize, usize), u64>,
}

impl CommNetwork {
    pub fn new(kind: NetworkKind) -> Self {
        CommNetwork {
            kind,
            nodes: Vec::new(),
            index: HashMap::new(),
            stance: Vec::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    /// Adds a node (unlabeled) if absent and returns its index.
    pub fn add_node(&mut self, user: &str) -> usize {
        if let Some(&i) = self.index.get(user) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(user.to_string());
        self.index.insert(user.to_string(), i);
        self.stance.push(Stance::Unlabeled);
        i
    }

    /// Adds one interaction; self-loops are dropped.
    pub fn add_edge(&mut self, src: &str, dst: &str) {
        if src == dst {
            self.add_node(src);
            return;
        }
        let s = self.add_node(src);
        let d = self.add_node(dst);
        *self.edges.entry((s, d)).or_insert(0) += 1;
    }

    pub fn set_stance(&mut self, user: &str, stance: Stance) {
        let i = self.add_node(user);
        self.stance[i] = stance;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Distinct directed edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn stance_of(&self, user: &str) -> Stance {
        self.index.get(user).map_or(Stance::Unlabeled, |&i| self.stance[i])
    }

    pub fn members(&self, stance: Stance) -> BTreeSet<String> {
        self.nodes
            .iter()
            .zip(&self.stance)
            .filter(|(_, &s)| s == stance)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// `(src, dst, multiplicity)` in insertion-index order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.edges
            .iter()
            .map(|(&(s, d), &w)| (self.nodes[s].as_str(), self.nodes[d].as_str(), w))
    }

    pub fn has_edge(&self, src: &str, dst: &str) -> bool {
        match (self.index.get(src), self.index.get(dst)) {
            (Some(&s), Some(&d)) => self.edges.contains_key(&(s, d)),
            _ => false,
        }
    }

    /// Same network with Pro and Anti exchanged.
    pub fn with_swapped_stances(&self) -> CommNetwork {
        let mut out = self.clone();
        for s in &mut out.stance {
            *s = s.opposite();
        }
        out
    }

    fn mask(&self, subset: Option<&BTreeSet<String>>) -> Vec<bool> {
        match subset {
            None => vec![true; self.nodes.len()],
            Some(set) => self.nodes.iter().map(|n| set.contains(n)).collect(),
        }
    }

    fn stance_mask(&self, stance: Stance) -> Vec<bool> {
        self.stance.iter().map(|&s| s == stance).collect()
    }

    /// CSV `src,dst,weight,kind`, sorted by source then target id.
    pub fn write_edges_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut rows: Vec<(&str, &str, u64)> = self.edges().collect();
        rows.sort();
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["src", "dst", "weight", "kind"])?;
        for (s, d, w) in rows {
            wtr.write_record([s, d, &w.to_string(), self.kind.as_str()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// One network of each kind. Every corpus author is a node; interaction
/// targets are added as they appear.
#[derive(Debug, Clone, PartialEq)]
pub struct Networks {
    pub mention: CommNetwork,
    pub retweet: CommNetwork,
    pub reply: CommNetwork,
}

impl Networks {
    pub fn get(&self, kind: NetworkKind) -> &CommNetwork {
        match kind {
            NetworkKind::Mention => &self.mention,
            NetworkKind::Retweet => &self.retweet,
            NetworkKind::Reply => &self.reply,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &CommNetwork> {
        [&self.mention, &self.retweet, &self.reply].into_iter()
    }
}

pub fn build_networks(corpus: &Corpus, stances: &StanceAssignment) -> Networks {
    let mut mention = CommNetwork::new(NetworkKind::Mention);
    let mut retweet = CommNetwork::new(NetworkKind::Retweet);
    let mut reply = CommNetwork::new(NetworkKind::Reply);
    for user in corpus.users().keys() {
        for net in [&mut mention, &mut retweet, &mut reply] {
            net.add_node(user);
        }
    }
    for tweet in corpus.tweets() {
        let author = tweet.user_id.as_str();
        if let Some(target) = &tweet.retweet_of_user {
            retweet.add_edge(author, target);
        }
        if let Some(target) = &tweet.reply_to_user {
            reply.add_edge(author, target);
        }
        for target in &tweet.mentioned_users {
            mention.add_edge(author, target);
        }
    }
    for net in [&mut mention, &mut retweet, &mut reply] {
        for i in 0..net.nodes.len() {
            net.stance[i] = stances.label(&net.nodes[i]);
        }
    }
    Networks { mention, retweet, reply }
}

fn count_nodes(mask: &[bool]) -> usize {
    mask.iter().filter(|&&m| m).count()
}

fn density_masked(net: &CommNetwork, mask: &[bool]) -> Result<f64> {
    let n = count_nodes(mask);
    if n < 2 {
        return Err(Error::Network(format!("density needs at least 2 nodes, got {n}")));
    }
    let inside = net.edges.keys().filter(|&&(s, d)| mask[s] && mask[d]).count();
    Ok(inside as f64 / (n as f64 * (n as f64 - 1.0)))
}

fn reciprocity_masked(net: &CommNetwork, mask: &[bool]) -> Result<f64> {
    let mut total = 0usize;
    let mut mutual = 0usize;
    for &(s, d) in net.edges.keys() {
        if mask[s] && mask[d] {
            total += 1;
            if net.edges.contains_key(&(d, s)) {
                mutual += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::Network("reciprocity of a graph without edges is undefined".into()));
    }
    Ok(mutual as f64 / total as f64)
}

/// Distinct directed edges within the (induced) node set over `n(n-1)`.
pub fn density(net: &CommNetwork, subset: Option<&BTreeSet<String>>) -> Result<f64> {
    density_masked(net, &net.mask(subset))
}

/// Share of distinct edges whose reverse edge also exists.
pub fn reciprocity(net: &CommNetwork, subset: Option<&BTreeSet<String>>) -> Result<f64> {
    reciprocity_masked(net, &net.mask(subset))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EiIndex {
    pub ei: f64,
    pub external: usize,
    pub internal: usize,
}

fn check_group(group: Stance) -> Result<()> {
    if group == Stance::Unlabeled {
        return Err(Error::Network("metrics are defined for the pro and anti groups only".into()));
    }
    Ok(())
}

/// `(EL - IL) / (EL + IL)`: internal links join two members of `group`,
/// external links join a member to the opposing group, in either direction.
pub fn ei_index(net: &CommNetwork, group: Stance) -> Result<EiIndex> {
    check_group(group)?;
    if !net.stance.contains(&group) {
        return Err(Error::Network(format!("no {group} members in the {} network", net.kind)));
    }
    let other = group.opposite();
    let (mut internal, mut external) = (0usize, 0usize);
    for &(s, d) in net.edges.keys() {
        let (a, b) = (net.stance[s], net.stance[d]);
        if a == group && b == group {
            internal += 1;
        } else if (a == group && b == other) || (a == other && b == group) {
            external += 1;
        }
    }
    if internal + external == 0 {
        return Err(Error::Network(format!(
            "EI index of the {group} group is undefined: no internal or external links in the {} network",
            net.kind
        )));
    }
    Ok(EiIndex {
        ei: (external as f64 - internal as f64) / (external + internal) as f64,
        external,
        internal,
    })
}

/// `(r * d)^(1/3)` on the subgraph induced by `group`.
pub fn echo_chamberness(net: &CommNetwork, group: Stance) -> Result<f64> {
    check_group(group)?;
    let mask = net.stance_mask(group);
    let d = density_masked(net, &mask)?;
    let r = reciprocity_masked(net, &mask)?;
    Ok(echo_chamberness_from(r, d))
}

pub fn echo_chamberness_from(reciprocity: f64, density: f64) -> f64 {
    (reciprocity * density).cbrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupNetworkMetrics {
    pub density_all: f64,
    pub density_pro: f64,
    pub density_anti: f64,
    pub ei_pro: f64,
    pub ei_anti: f64,
    pub ec_pro: f64,
    pub ec_anti: f64,
    pub el_pro: usize,
    pub il_pro: usize,
    pub el_anti: usize,
    pub il_anti: usize,
    pub reciprocity_pro: f64,
    pub reciprocity_anti: f64,
}

/// Every community measure for one network; fails if any is undefined.
pub fn group_metrics(net: &CommNetwork) -> Result<GroupNetworkMetrics> {
    let partial = PartialNetworkMetrics::compute(net);
    let need = |v: Option<f64>, what: &str| {
        v.ok_or_else(|| Error::Network(format!("{what} is undefined for the {} network", net.kind)))
    };
    for stance in [Stance::Pro, Stance::Anti] {
        if !net.stance.contains(&stance) {
            return Err(Error::Network(format!("no {stance} members in the {} network", net.kind)));
        }
    }
    let ei_pro = ei_index(net, Stance::Pro)?;
    let ei_anti = ei_index(net, Stance::Anti)?;
    Ok(GroupNetworkMetrics {
        density_all: need(partial.density_all, "density")?,
        density_pro: need(partial.density_pro, "pro density")?,
        density_anti: need(partial.density_anti, "anti density")?,
        ei_pro: ei_pro.ei,
        ei_anti: ei_anti.ei,
        ec_pro: echo_chamberness(net, Stance::Pro)?,
        ec_anti: echo_chamberness(net, Stance::Anti)?,
        el_pro: ei_pro.external,
        il_pro: ei_pro.internal,
        el_anti: ei_anti.external,
        il_anti: ei_anti.internal,
        reciprocity_pro: need(partial.reciprocity_pro, "pro reciprocity")?,
        reciprocity_anti: need(partial.reciprocity_anti, "anti reciprocity")?,
    })
}

/// Same measures as [`GroupNetworkMetrics`], each absent where undefined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialNetworkMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub density_all: Option<f64>,
    pub density_pro: Option<f64>,
    pub density_anti: Option<f64>,
    pub ei_pro: Option<EiIndex>,
    pub ei_anti: Option<EiIndex>,
    pub ec_pro: Option<f64>,
    pub ec_anti: Option<f64>,
    pub reciprocity_pro: Option<f64>,
    pub reciprocity_anti: Option<f64>,
}

impl PartialNetworkMetrics {
    pub fn compute(net: &CommNetwork) -> Self {
        let pro = net.stance_mask(Stance::Pro);
        let anti = net.stance_mask(Stance::Anti);
        PartialNetworkMetrics {
            nodes: net.node_count(),
            edges: net.edge_count(),
            density_all: density_masked(net, &vec![true; net.node_count()]).ok(),
            density_pro: density_masked(net, &pro).ok(),
            density_anti: density_masked(net, &anti).ok(),
            ei_pro: ei_index(net, Stance::Pro).ok(),
            ei_anti: ei_index(net, Stance::Anti).ok(),
            ec_pro: echo_chamberness(net, Stance::Pro).ok(),
            ec_anti: echo_chamberness(net, Stance::Anti).ok(),
            reciprocity_pro: reciprocity_masked(net, &pro).ok(),
            reciprocity_anti: reciprocity_masked(net, &anti).ok(),
        }
    }
}
