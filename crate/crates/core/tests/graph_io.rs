mod common;

use std::fs;

use proptest::prelude::*;

use cloneguard::io::{load_graph, save_csv_dir, save_json, Format, LoadOptions};
use cloneguard::{Attribute, AttributeProfile, GraphBuilder, NodeId, SocialGraph};

const TEXT: &str = "[a-zA-Z0-9 ,\"'éß-]{0,12}";

fn profile_strategy() -> impl Strategy<Value = AttributeProfile> {
    let field = || proptest::option::of(TEXT);
    (
        "[A-Za-z][A-Za-z ,\"é]{0,15}",
        proptest::collection::vec(field(), 7),
        proptest::option::of(1900i32..2020),
    )
        .prop_map(|(name, fields, year)| {
            // CSV cells are trimmed on load.
            let mut p = AttributeProfile::named(name.trim());
            let attrs = [
                Attribute::Gender,
                Attribute::School,
                Attribute::Degree,
                Attribute::Employer,
                Attribute::Position,
                Attribute::Location,
                Attribute::Relationship,
            ];
            for (attr, v) in attrs.into_iter().zip(fields) {
                p.set(attr, v.as_deref()).unwrap();
            }
            p.birth_year = year;
            p
        })
}

prop_compose! {
    fn graph_strategy()(
        ids in proptest::collection::btree_set(0u64..10_000, 1..25),
        seed in any::<u64>(),
    )(
        profiles in proptest::collection::vec(profile_strategy(), ids.len()),
        ids in Just(ids),
        seed in Just(seed),
    ) -> SocialGraph {
        let ids: Vec<u64> = ids.into_iter().collect();
        let mut b = GraphBuilder::new();
        for (id, p) in ids.iter().zip(profiles) {
            b.add_node(NodeId(*id), p).unwrap();
        }
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let n = ids.len() as u64;
        for _ in 0..2 * n {
            let (x, y) = (ids[(next() % n) as usize], ids[(next() % n) as usize]);
            if x != y {
                b.add_edge(NodeId(x), NodeId(y));
                if next() % 2 == 0 {
                    b.add_interaction(NodeId(y), NodeId(x));
                }
            }
        }
        for &id in &ids {
            for _ in 0..next() % 3 {
                b.add_page_like(NodeId(id), format!("page, \"{}\"", next() % 5));
            }
            for _ in 0..next() % 3 {
                b.add_url(NodeId(id), format!("https://e.example/{}", next() % 4));
            }
        }
        b.build().unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(g in graph_strategy()) {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("g");
        save_csv_dir(&g, &dir).unwrap();
        let back = load_graph(&dir, &LoadOptions::default()).unwrap();
        prop_assert_eq!(&back, &g);

        let again = tmp.path().join("h");
        save_csv_dir(&back, &again).unwrap();
        for name in ["nodes.csv", "edges.csv", "interactions.csv", "pagelikes.csv", "urls.csv"] {
            prop_assert_eq!(fs::read(dir.join(name)).unwrap(), fs::read(again.join(name)).unwrap());
        }
    }

    #[test]
    fn json_round_trip(g in graph_strategy()) {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("g.json");
        save_json(&g, &path).unwrap();
        let back = load_graph(&path, &LoadOptions { format: Format::Json }).unwrap();
        prop_assert_eq!(&back, &g);
        let auto = load_graph(&path, &LoadOptions::default()).unwrap();
        prop_assert_eq!(&auto, &g);
    }

    #[test]
    fn adjacency_is_symmetric(g in graph_strategy()) {
        let mut stored = 0;
        for i in 0..g.node_count() {
            prop_assert_eq!(g.degree(i), g.friends(i).len());
            for &j in g.friends(i) {
                prop_assert!(g.friends(j as usize).contains(&(i as u32)));
                prop_assert!(g.are_friends(j as usize, i));
                stored += 1;
            }
        }
        prop_assert_eq!(stored, 2 * g.edge_count());
        let report = g.validate();
        prop_assert!((report.avg_degree - stored as f64 / g.node_count() as f64).abs() < 1e-12);
    }
}

#[test]
fn loading_twice_gives_equal_graphs() {
    let dir = common::fixtures_dir().join("fixture20-clone");
    let a = load_graph(&dir, &LoadOptions::default()).unwrap();
    let b = load_graph(&dir, &LoadOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.node_count(), 21);
}

#[test]
fn one_directional_interaction_log_is_symmetrized() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(
        dir.join("nodes.csv"),
        "id,name,gender,school,degree,employer,position,birth_year,location,relationship\n1,A,,,,,,,,\n2,B,,,,,,,,\n",
    )
    .unwrap();
    fs::write(dir.join("edges.csv"), "src,dst\n1,2\n").unwrap();
    fs::write(dir.join("interactions.csv"), "src,dst\n2,1\n").unwrap();
    let g = load_graph(dir, &LoadOptions::default()).unwrap();
    assert_eq!(g.interactions(0), &[1]);
    assert_eq!(g.interactions(1), &[0]);
    assert_eq!(g.profile(0).gender, None);
}
