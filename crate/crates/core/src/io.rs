//! Loading and saving graphs.
//!
//! Two layouts are supported. A directory of headed, comma-separated UTF-8
//! files:
//!
//! | file               | columns                                                                       |
//! |--------------------|-------------------------------------------------------------------------------|
//! | `nodes.csv`        | `id,name,gender,school,degree,employer,position,birth_year,location,relationship` |
//! | `edges.csv`        | `src,dst`                                                                     |
//! | `interactions.csv` | `src,dst`                                                                     |
//! | `pagelikes.csv`    | `node,page_id`                                                                |
//! | `urls.csv`         | `node,url_id`                                                                 |
//!
//! `nodes.csv` and `edges.csv` are required, the other three default to empty.
//! An empty cell is an absent attribute. Or a single JSON document with the
//! same five collections (see [`GraphDocument`]).

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{parse_birth_year, AttributeProfile, GraphBuilder, NodeId, SocialGraph};

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const INTERACTIONS_FILE: &str = "interactions.csv";
pub const PAGELIKES_FILE: &str = "pagelikes.csv";
pub const URLS_FILE: &str = "urls.csv";

const NODE_HEADER: [&str; 10] = [
    "id",
    "name",
    "gender",
    "school",
    "degree",
    "employer",
    "position",
    "birth_year",
    "location",
    "relationship",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    /// Directory means CSV, anything else is read as JSON.
    #[default]
    Auto,
    CsvDir,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    pub format: Format,
}

pub fn load_graph(path: impl AsRef<Path>, options: &LoadOptions) -> Result<SocialGraph> {
    let path = path.as_ref();
    match options.format {
        Format::CsvDir => load_csv_dir(path),
        Format::Json => load_json(path),
        Format::Auto if path.is_dir() => load_csv_dir(path),
        Format::Auto => load_json(path),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// Reads one headed CSV file, handing each record and its line number to `row`.
fn read_rows(path: &Path, header: &[&str], mut row: impl FnMut(&csv::StringRecord, u64) -> Result<()>) -> Result<()> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Ok(());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let malformed = |line: u64, message: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    };
    let found = reader.headers().map_err(|e| malformed(1, e.to_string()))?;
    if found.iter().collect::<Vec<_>>() != header {
        return Err(malformed(
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        row(&record, line)?;
    }
    Ok(())
}

fn parse_id(path: &Path, line: u64, cell: &str) -> Result<NodeId> {
    cell.parse::<u64>().map(NodeId).map_err(|_| Error::Malformed {
        path: path.to_path_buf(),
        line,
        message: format!("`{cell}` is not a node id"),
    })
}

fn load_csv_dir(dir: &Path) -> Result<SocialGraph> {
    let mut builder = GraphBuilder::new();

    let nodes_path = dir.join(NODES_FILE);
    read_rows(&nodes_path, &NODE_HEADER, |rec, line| {
        let id = parse_id(&nodes_path, line, &rec[0])?;
        let malformed = |message: String| Error::Malformed {
            path: nodes_path.clone(),
            line,
            message,
        };
        if builder.contains(id) {
            return Err(Error::DuplicateNode {
                path: nodes_path.clone(),
                line,
                id,
            });
        }
        let opt = |i: usize| Some(rec[i].to_owned()).filter(|s| !s.is_empty());
        let profile = AttributeProfile {
            name: rec[1].to_owned(),
            gender: opt(2),
            school: opt(3),
            degree: opt(4),
            employer: opt(5),
            position: opt(6),
            birth_year: opt(7)
                .map(|s| parse_birth_year(&s))
                .transpose()
                .map_err(|e| malformed(e.to_string()))?,
            location: opt(8),
            relationship: opt(9),
        };
        profile.check().map_err(malformed)?;
        builder.add_node(id, profile)?;
        Ok(())
    })?;

    let pair_file = |name: &str,
                     header: [&str; 2],
                     required: bool,
                     builder: &mut GraphBuilder,
                     add: &dyn Fn(&mut GraphBuilder, NodeId, NodeId)|
     -> Result<()> {
        let path = dir.join(name);
        if !required && !path.exists() {
            return Ok(());
        }
        read_rows(&path, &header, |rec, line| {
            let a = parse_id(&path, line, &rec[0])?;
            let b = parse_id(&path, line, &rec[1])?;
            for id in [a, b] {
                if !builder.contains(id) {
                    return Err(Error::UndeclaredNode {
                        path: path.clone(),
                        line,
                        id,
                    });
                }
            }
            if a == b {
                return Err(Error::Malformed {
                    path: path.clone(),
                    line,
                    message: format!("self-loop on node {a}"),
                });
            }
            add(builder, a, b);
            Ok(())
        })
    };
    pair_file(EDGES_FILE, ["src", "dst"], true, &mut builder, &|b, x, y| {
        b.add_edge(x, y);
    })?;
    pair_file(INTERACTIONS_FILE, ["src", "dst"], false, &mut builder, &|b, x, y| {
        b.add_interaction(x, y);
    })?;

    let item_file = |name: &str,
                     header: [&str; 2],
                     builder: &mut GraphBuilder,
                     add: &dyn Fn(&mut GraphBuilder, NodeId, String)|
     -> Result<()> {
        let path = dir.join(name);
        if !path.exists() {
            return Ok(());
        }
        read_rows(&path, &header, |rec, line| {
            let node = parse_id(&path, line, &rec[0])?;
            if !builder.contains(node) {
                return Err(Error::UndeclaredNode {
                    path: path.clone(),
                    line,
                    id: node,
                });
            }
            if rec[1].is_empty() {
                return Err(Error::Malformed {
                    path: path.clone(),
                    line,
                    message: format!("empty {}", header[1]),
                });
            }
            add(builder, node, rec[1].to_owned());
            Ok(())
        })
    };
    item_file(PAGELIKES_FILE, ["node", "page_id"], &mut builder, &|b, n, p| {
        b.add_page_like(n, p);
    })?;
    item_file(URLS_FILE, ["node", "url_id"], &mut builder, &|b, n, u| {
        b.add_url(n, u);
    })?;

    builder.build()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Writes `graph` in the CSV directory layout, creating `dir` if needed.
/// Rows are emitted in ascending id order so output is byte-stable.
pub fn save_csv_dir(graph: &SocialGraph, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut w = csv_writer(&dir.join(NODES_FILE))?;
    w.write_record(NODE_HEADER)?;
    for (i, id) in graph.ids().iter().enumerate() {
        let p = graph.profile(i);
        let s = |v: &Option<String>| v.clone().unwrap_or_default();
        w.write_record([
            id.to_string(),
            p.name.clone(),
            s(&p.gender),
            s(&p.school),
            s(&p.degree),
            s(&p.employer),
            s(&p.position),
            p.birth_year.map(|y| y.to_string()).unwrap_or_default(),
            s(&p.location),
            s(&p.relationship),
        ])?;
    }
    w.flush().map_err(|e| Error::io(dir.join(NODES_FILE), e))?;

    for (name, pairs) in [
        (EDGES_FILE, graph.edges().collect::<Vec<_>>()),
        (INTERACTIONS_FILE, graph.interaction_pairs().collect()),
    ] {
        let mut w = csv_writer(&dir.join(name))?;
        w.write_record(["src", "dst"])?;
        for (a, b) in pairs {
            w.write_record([graph.id(a).to_string(), graph.id(b).to_string()])?;
        }
        w.flush().map_err(|e| Error::io(dir.join(name), e))?;
    }

    let mut w = csv_writer(&dir.join(PAGELIKES_FILE))?;
    w.write_record(["node", "page_id"])?;
    for (i, id) in graph.ids().iter().enumerate() {
        for &p in graph.page_likes(i) {
            w.write_record([id.to_string(), graph.page_name(p).to_owned()])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir.join(PAGELIKES_FILE), e))?;

    let mut w = csv_writer(&dir.join(URLS_FILE))?;
    w.write_record(["node", "url_id"])?;
    for (i, id) in graph.ids().iter().enumerate() {
        for &u in graph.urls(i) {
            w.write_record([id.to_string(), graph.url_name(u).to_owned()])?;
        }
    }
    w.flush().map_err(|e| Error::io(dir.join(URLS_FILE), e))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    #[serde(flatten)]
    pub profile: AttributeProfile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageLikeRecord {
    pub node: NodeId,
    pub page_id: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlRecord {
    pub node: NodeId,
    pub url_id: String,
}

/// Single-file JSON layout. Edge and interaction entries are `[src, dst]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub nodes: Vec<NodeRecord>,
    #[serde(default)]
    pub edges: Vec<(NodeId, NodeId)>,
    #[serde(default)]
    pub interactions: Vec<(NodeId, NodeId)>,
    #[serde(default)]
    pub pagelikes: Vec<PageLikeRecord>,
    #[serde(default)]
    pub urls: Vec<UrlRecord>,
}

impl GraphDocument {
    pub fn from_graph(graph: &SocialGraph) -> Self {
        let ids = graph.ids();
        GraphDocument {
            nodes: ids
                .iter()
                .enumerate()
                .map(|(i, &id)| NodeRecord {
                    id,
                    profile: graph.profile(i).clone(),
                })
                .collect(),
            edges: graph.edges().map(|(a, b)| (ids[a], ids[b])).collect(),
            interactions: graph.interaction_pairs().map(|(a, b)| (ids[a], ids[b])).collect(),
            pagelikes: ids
                .iter()
                .enumerate()
                .flat_map(|(i, &node)| {
                    graph.page_likes(i).iter().map(move |&p| PageLikeRecord {
                        node,
                        page_id: graph.page_name(p).to_owned(),
                    })
                })
                .collect(),
            urls: ids
                .iter()
                .enumerate()
                .flat_map(|(i, &node)| {
                    graph.urls(i).iter().map(move |&u| UrlRecord {
                        node,
                        url_id: graph.url_name(u).to_owned(),
                    })
                })
                .collect(),
        }
    }

    /// Validates the document, reporting offending entries by collection
    /// and 1-based position.
    pub fn into_graph(self, source: &Path) -> Result<SocialGraph> {
        let at = |collection: &str| PathBuf::from(format!("{}#{collection}", source.display()));
        let mut builder = GraphBuilder::new();
        for (k, rec) in self.nodes.into_iter().enumerate() {
            let line = k as u64 + 1;
            if builder.contains(rec.id) {
                return Err(Error::DuplicateNode {
                    path: at("nodes"),
                    line,
                    id: rec.id,
                });
            }
            rec.profile.check().map_err(|message| Error::Malformed {
                path: at("nodes"),
                line,
                message,
            })?;
            builder.add_node(rec.id, rec.profile)?;
        }
        for (collection, pairs) in [("edges", &self.edges), ("interactions", &self.interactions)] {
            for (k, &(a, b)) in pairs.iter().enumerate() {
                let line = k as u64 + 1;
                for id in [a, b] {
                    if !builder.contains(id) {
                        return Err(Error::UndeclaredNode {
                            path: at(collection),
                            line,
                            id,
                        });
                    }
                }
                if a == b {
                    return Err(Error::Malformed {
                        path: at(collection),
                        line,
                        message: format!("self-loop on node {a}"),
                    });
                }
                if collection == "edges" {
                    builder.add_edge(a, b);
                } else {
                    builder.add_interaction(a, b);
                }
            }
        }
        for (k, rec) in self.pagelikes.into_iter().enumerate() {
            if !builder.contains(rec.node) {
                return Err(Error::UndeclaredNode {
                    path: at("pagelikes"),
                    line: k as u64 + 1,
                    id: rec.node,
                });
            }
            builder.add_page_like(rec.node, rec.page_id);
        }
        for (k, rec) in self.urls.into_iter().enumerate() {
            if !builder.contains(rec.node) {
                return Err(Error::UndeclaredNode {
                    path: at("urls"),
                    line: k as u64 + 1,
                    id: rec.node,
                });
            }
            builder.add_url(rec.node, rec.url_id);
        }
        builder.build()
    }
}

fn load_json(path: &Path) -> Result<SocialGraph> {
    let doc: GraphDocument = serde_json::from_reader(open(path)?)?;
    doc.into_graph(path)
}

pub fn save_json(graph: &SocialGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, &GraphDocument::from_graph(graph))?;
    file.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}
