//! Social graph model.
//!
//! A [`SocialGraph`] holds the friendship relation together with the per-node
//! evidence the detector works from: an attribute profile, the set of users a
//! node interacted with, the pages it liked and the URLs it shared.
//!
//! External node ids are arbitrary non-negative integers. Internally nodes are
//! addressed by a dense index in `0..node_count()`, assigned in ascending id
//! order, so "ascending index" and "ascending id" always agree. Matrix-level
//! modules work on indices; graph-level operations accept [`NodeId`]s.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// External identifier of a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for NodeId {
    fn from(id: u64) -> Self {
        NodeId(id)
    }
}

/// The nine profile attributes, in on-disk column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Name,
    Gender,
    School,
    Degree,
    Employer,
    Position,
    BirthYear,
    Location,
    Relationship,
}

impl Attribute {
    pub const ALL: [Attribute; 9] = [
        Attribute::Name,
        Attribute::Gender,
        Attribute::School,
        Attribute::Degree,
        Attribute::Employer,
        Attribute::Position,
        Attribute::BirthYear,
        Attribute::Location,
        Attribute::Relationship,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Attribute::Name => "name",
            Attribute::Gender => "gender",
            Attribute::School => "school",
            Attribute::Degree => "degree",
            Attribute::Employer => "employer",
            Attribute::Position => "position",
            Attribute::BirthYear => "birth_year",
            Attribute::Location => "location",
            Attribute::Relationship => "relationship",
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown attribute `{s}`")))
    }
}

pub const MIN_BIRTH_YEAR: i32 = 1850;
pub const MAX_BIRTH_YEAR: i32 = 2100;

/// Profile attributes of one user. `None` marks an absent value; an empty
/// string is never used for that purpose.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeProfile {
    pub name: String,
    pub gender: Option<String>,
    pub school: Option<String>,
    pub degree: Option<String>,
    pub employer: Option<String>,
    pub position: Option<String>,
    pub birth_year: Option<i32>,
    pub location: Option<String>,
    pub relationship: Option<String>,
}

impl AttributeProfile {
    pub fn named(name: impl Into<String>) -> Self {
        AttributeProfile {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Renders one attribute as text, `None` when absent.
    pub fn get(&self, attr: Attribute) -> Option<String> {
        match attr {
            Attribute::Name => Some(self.name.clone()),
            Attribute::BirthYear => self.birth_year.map(|y| y.to_string()),
            other => self.categorical(other).map(str::to_owned),
        }
    }

    /// Sets one attribute from text. Surrounding whitespace is dropped and a
    /// blank value clears the field (the name cannot be cleared).
    pub fn set(&mut self, attr: Attribute, value: Option<&str>) -> Result<()> {
        let value = value.map(str::trim).filter(|v| !v.is_empty());
        let owned = value.map(str::to_owned);
        match attr {
            Attribute::Name => {
                self.name = owned.ok_or_else(|| Error::InvalidParam("profile name cannot be empty".into()))?
            }
            Attribute::Gender => self.gender = owned,
            Attribute::School => self.school = owned,
            Attribute::Degree => self.degree = owned,
            Attribute::Employer => self.employer = owned,
            Attribute::Position => self.position = owned,
            Attribute::BirthYear => self.birth_year = value.map(parse_birth_year).transpose()?,
            Attribute::Location => self.location = owned,
            Attribute::Relationship => self.relationship = owned,
        }
        Ok(())
    }

    pub(crate) fn categorical(&self, attr: Attribute) -> Option<&str> {
        match attr {
            Attribute::Gender => self.gender.as_deref(),
            Attribute::School => self.school.as_deref(),
            Attribute::Degree => self.degree.as_deref(),
            Attribute::Employer => self.employer.as_deref(),
            Attribute::Position => self.position.as_deref(),
            Attribute::Location => self.location.as_deref(),
            Attribute::Relationship => self.relationship.as_deref(),
            Attribute::Name | Attribute::BirthYear => None,
        }
    }

    /// Attributes with no value.
    pub fn missing(&self) -> Vec<Attribute> {
        Attribute::ALL
            .into_iter()
            .filter(|&a| a != Attribute::Name && self.get(a).is_none())
            .collect()
    }

    pub(crate) fn check(&self) -> std::result::Result<(), String> {
        if self.name.is_empty() {
            return Err("name must not be empty".into());
        }
        if let Some(y) = self.birth_year {
            if !(MIN_BIRTH_YEAR..=MAX_BIRTH_YEAR).contains(&y) {
                return Err(format!("birth_year {y} outside [{MIN_BIRTH_YEAR}, {MAX_BIRTH_YEAR}]"));
            }
        }
        Ok(())
    }
}

pub(crate) fn parse_birth_year(s: &str) -> Result<i32> {
    let year: i32 = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("birth_year `{s}` is not an integer")))?;
    if !(MIN_BIRTH_YEAR..=MAX_BIRTH_YEAR).contains(&year) {
        return Err(Error::InvalidParam(format!(
            "birth_year {year} outside [{MIN_BIRTH_YEAR}, {MAX_BIRTH_YEAR}]"
        )));
    }
    Ok(year)
}

/// Immutable social network: nodes, symmetric friendships, attribute profiles,
/// symmetric interactions, page likes and shared URLs.
///
/// Page and URL identifiers are interned in sorted order, so two graphs built
/// from the same content compare equal regardless of input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocialGraph {
    ids: Vec<NodeId>,
    attrs: Vec<AttributeProfile>,
    friends: Vec<Vec<u32>>,
    interactions: Vec<Vec<u32>>,
    page_likes: Vec<Vec<u32>>,
    urls: Vec<Vec<u32>>,
    page_names: Vec<String>,
    url_names: Vec<String>,
    edge_count: usize,
}

impl SocialGraph {
    pub fn empty() -> Self {
        GraphBuilder::new().build().expect("empty graph is valid")
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of undirected friendship edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// External ids in index order (ascending).
    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> NodeId {
        self.ids[index]
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn index_of(&self, id: NodeId) -> Result<usize> {
        self.ids.binary_search(&id).map_err(|_| Error::UnknownNode(id))
    }

    pub fn max_id(&self) -> Option<NodeId> {
        self.ids.last().copied()
    }

    pub fn profile(&self, index: usize) -> &AttributeProfile {
        &self.attrs[index]
    }

    pub fn profiles(&self) -> &[AttributeProfile] {
        &self.attrs
    }

    /// Sorted friend indices of `index` (the set F_i).
    pub fn friends(&self, index: usize) -> &[u32] {
        &self.friends[index]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.friends[index].len()
    }

    /// Sorted indices of interaction counterparties (the set I_i).
    pub fn interactions(&self, index: usize) -> &[u32] {
        &self.interactions[index]
    }

    /// Sorted interned page ids liked by `index`.
    pub fn page_likes(&self, index: usize) -> &[u32] {
        &self.page_likes[index]
    }

    /// Sorted interned URL ids shared by `index`.
    pub fn urls(&self, index: usize) -> &[u32] {
        &self.urls[index]
    }

    pub fn page_name(&self, page: u32) -> &str {
        &self.page_names[page as usize]
    }

    pub fn url_name(&self, url: u32) -> &str {
        &self.url_names[url as usize]
    }

    pub fn are_friends(&self, a: usize, b: usize) -> bool {
        self.friends[a].binary_search(&(b as u32)).is_ok()
    }

    /// Undirected edges as `(lo, hi)` index pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.friends.iter().enumerate().flat_map(|(a, fs)| {
            let start = fs.partition_point(|&b| (b as usize) <= a);
            fs[start..].iter().map(move |&b| (a, b as usize))
        })
    }

    /// Undirected interaction pairs as `(lo, hi)` index pairs.
    pub fn interaction_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.interactions.iter().enumerate().flat_map(|(a, xs)| {
            let start = xs.partition_point(|&b| (b as usize) <= a);
            xs[start..].iter().map(move |&b| (a, b as usize))
        })
    }

    /// Rebuilds a builder holding exactly this graph's content.
    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        for (i, id) in self.ids.iter().enumerate() {
            b.nodes.insert(*id, self.attrs[i].clone());
        }
        b.edges = self.edges().map(|(x, y)| (self.ids[x], self.ids[y])).collect();
        b.interactions = self
            .interaction_pairs()
            .map(|(x, y)| (self.ids[x], self.ids[y]))
            .collect();
        for (i, id) in self.ids.iter().enumerate() {
            for &p in &self.page_likes[i] {
                b.page_likes.push((*id, self.page_names[p as usize].clone()));
            }
            for &u in &self.urls[i] {
                b.urls.push((*id, self.url_names[u as usize].clone()));
            }
        }
        b
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// Collects graph content and enforces the [`SocialGraph`] invariants on
/// [`build`](GraphBuilder::build).
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeMap<NodeId, AttributeProfile>,
    edges: Vec<(NodeId, NodeId)>,
    interactions: Vec<(NodeId, NodeId)>,
    page_likes: Vec<(NodeId, String)>,
    urls: Vec<(NodeId, String)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn add_node(&mut self, id: NodeId, profile: AttributeProfile) -> Result<&mut Self> {
        profile
            .check()
            .map_err(|m| Error::InvalidParam(format!("node {id}: {m}")))?;
        if self.nodes.insert(id, profile).is_some() {
            return Err(Error::InvalidParam(format!("duplicate node id {id}")));
        }
        Ok(self)
    }

    /// Adds an undirected friendship. Duplicates collapse on build.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> &mut Self {
        self.edges.push((a, b));
        self
    }

    /// Records an interaction; stored symmetrically.
    pub fn add_interaction(&mut self, a: NodeId, b: NodeId) -> &mut Self {
        self.interactions.push((a, b));
        self
    }

    pub fn add_page_like(&mut self, node: NodeId, page: impl Into<String>) -> &mut Self {
        self.page_likes.push((node, page.into()));
        self
    }

    pub fn add_url(&mut self, node: NodeId, url: impl Into<String>) -> &mut Self {
        self.urls.push((node, url.into()));
        self
    }

    pub fn build(self) -> Result<SocialGraph> {
        let ids: Vec<NodeId> = self.nodes.keys().copied().collect();
        let attrs: Vec<AttributeProfile> = self.nodes.into_values().collect();
        let n = ids.len();
        let index = |id: NodeId| -> Result<u32> {
            ids.binary_search(&id)
                .map(|i| i as u32)
                .map_err(|_| Error::UnknownNode(id))
        };

        let symmetric = |pairs: &[(NodeId, NodeId)], what: &str| -> Result<Vec<Vec<u32>>> {
            let mut lists = vec![Vec::new(); n];
            for &(a, b) in pairs {
                if a == b {
                    return Err(Error::InvalidParam(format!("self-loop {what} on node {a}")));
                }
                let (ia, ib) = (index(a)?, index(b)?);
                lists[ia as usize].push(ib);
                lists[ib as usize].push(ia);
            }
            for l in &mut lists {
                l.sort_unstable();
                l.dedup();
            }
            Ok(lists)
        };
        let friends = symmetric(&self.edges, "edge")?;
        let interactions = symmetric(&self.interactions, "interaction")?;
        let edge_count = friends.iter().map(Vec::len).sum::<usize>() / 2;

        let interned = |items: Vec<(NodeId, String)>| -> Result<(Vec<Vec<u32>>, Vec<String>)> {
            let mut names: Vec<String> = items.iter().map(|(_, s)| s.clone()).collect();
            names.sort_unstable();
            names.dedup();
            let mut lists = vec![Vec::new(); n];
            for (node, s) in &items {
                let i = index(*node)?;
                let key = names.binary_search(s).expect("interned") as u32;
                lists[i as usize].push(key);
            }
            for l in &mut lists {
                l.sort_unstable();
                l.dedup();
            }
            Ok((lists, names))
        };
        let (page_likes, page_names) = interned(self.page_likes)?;
        let (urls, url_names) = interned(self.urls)?;

        Ok(SocialGraph {
            ids,
            attrs,
            friends,
            interactions,
            page_likes,
            urls,
            page_names,
            url_names,
            edge_count,
        })
    }
}

/// A problem found by [`validate`] that does not make the graph unusable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    MissingAttributes { node: NodeId, fields: Vec<Attribute> },
    Isolated { node: NodeId },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::MissingAttributes { node, fields } => {
                let names: Vec<&str> = fields.iter().map(|a| a.as_str()).collect();
                write!(f, "node {node}: missing {}", names.join(", "))
            }
            Diagnostic::Isolated { node } => write!(f, "node {node}: no friendship edges"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub node_count: usize,
    pub edge_count: usize,
    /// `2 * edge_count / node_count`, or 0 for an empty graph.
    pub avg_degree: f64,
    pub orphan_records: Vec<Diagnostic>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes: {}", self.node_count)?;
        writeln!(f, "edges: {}", self.edge_count)?;
        writeln!(f, "average degree: {:.3}", self.avg_degree)?;
        writeln!(f, "diagnostics: {}", self.orphan_records.len())?;
        for d in &self.orphan_records {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

pub fn validate(graph: &SocialGraph) -> ValidationReport {
    let n = graph.node_count();
    let m = graph.edge_count();
    let mut orphan_records = Vec::new();
    for i in 0..n {
        let id = graph.id(i);
        let missing = graph.profile(i).missing();
        if !missing.is_empty() {
            orphan_records.push(Diagnostic::MissingAttributes {
                node: id,
                fields: missing,
            });
        }
        if graph.degree(i) == 0 {
            orphan_records.push(Diagnostic::Isolated { node: id });
        }
    }
    ValidationReport {
        node_count: n,
        edge_count: m,
        avg_degree: if n == 0 { 0.0 } else { 2.0 * m as f64 / n as f64 },
        orphan_records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SocialGraph {
        let mut b = GraphBuilder::new();
        for id in 1..=3 {
            b.add_node(NodeId(id), AttributeProfile::named(format!("n{id}")))
                .unwrap();
        }
        b.add_edge(NodeId(1), NodeId(2))
            .add_edge(NodeId(2), NodeId(3))
            .add_edge(NodeId(3), NodeId(1))
            .add_edge(NodeId(2), NodeId(1));
        b.build().unwrap()
    }

    #[test]
    fn triangle_report() {
        let g = triangle();
        let r = g.validate();
        assert_eq!(r.node_count, 3);
        assert_eq!(r.edge_count, 3);
        assert_eq!(r.avg_degree, 2.0);
    }

    #[test]
    fn edges_are_symmetric_and_deduplicated() {
        let g = triangle();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(g.are_friends(2, 0) && g.are_friends(0, 2));
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn interactions_are_symmetrized() {
        let mut b = GraphBuilder::new();
        b.add_node(NodeId(7), AttributeProfile::named("a")).unwrap();
        b.add_node(NodeId(9), AttributeProfile::named("b")).unwrap();
        b.add_interaction(NodeId(9), NodeId(7));
        let g = b.build().unwrap();
        assert_eq!(g.interactions(0), &[1]);
        assert_eq!(g.interactions(1), &[0]);
    }

    #[test]
    fn rejects_undeclared_and_self_loops() {
        let mut b = GraphBuilder::new();
        b.add_node(NodeId(1), AttributeProfile::named("a")).unwrap();
        b.add_edge(NodeId(1), NodeId(2));
        assert!(matches!(b.build(), Err(Error::UnknownNode(NodeId(2)))));

        let mut b = GraphBuilder::new();
        b.add_node(NodeId(1), AttributeProfile::named("a")).unwrap();
        b.add_edge(NodeId(1), NodeId(1));
        assert!(b.build().is_err());
    }

    #[test]
    fn rejects_duplicate_and_invalid_profiles() {
        let mut b = GraphBuilder::new();
        b.add_node(NodeId(1), AttributeProfile::named("a")).unwrap();
        assert!(b.add_node(NodeId(1), AttributeProfile::named("b")).is_err());
        assert!(b.add_node(NodeId(2), AttributeProfile::named("")).is_err());
        let mut p = AttributeProfile::named("c");
        p.birth_year = Some(1700);
        assert!(b.add_node(NodeId(3), p).is_err());
    }

    #[test]
    fn missing_attributes_are_flagged() {
        let mut p = AttributeProfile::named("x");
        p.gender = Some("Female".into());
        let mut b = GraphBuilder::new();
        b.add_node(NodeId(4), p).unwrap();
        let r = b.build().unwrap().validate();
        assert_eq!(r.orphan_records.len(), 2);
        match &r.orphan_records[0] {
            Diagnostic::MissingAttributes { node, fields } => {
                assert_eq!(*node, NodeId(4));
                assert_eq!(fields.len(), 7);
                assert!(!fields.contains(&Attribute::Gender));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn attribute_set_and_get() {
        let mut p = AttributeProfile::named("x");
        p.set(Attribute::BirthYear, Some("1980")).unwrap();
        p.set(Attribute::Degree, Some("Bachelor")).unwrap();
        assert_eq!(p.get(Attribute::BirthYear).as_deref(), Some("1980"));
        assert_eq!(p.get(Attribute::Degree).as_deref(), Some("Bachelor"));
        p.set(Attribute::Degree, None).unwrap();
        assert_eq!(p.degree, None);
        assert!(p.set(Attribute::Name, None).is_err());
        assert!(p.set(Attribute::BirthYear, Some("abc")).is_err());
        assert_eq!("birth_year".parse::<Attribute>().unwrap(), Attribute::BirthYear);
    }
}
