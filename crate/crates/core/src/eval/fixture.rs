//! The 20-user demonstration network and its forged copy of user 35.
//!
//! Attribute rows are the published ones. The friendship topology was never
//! published, so the 50 edges here are laid out along the three regional
//! groups (USA, UK/Europe, Australia/Canada) with a few bridges between them.

use crate::error::Result;
use crate::graph::{Attribute, AttributeProfile, GraphBuilder, NodeId, SocialGraph};

use super::inject::{inject_clone, CloneInjectionSpec, Perturbation};

type Row = (
    u64,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    i32,
    &'static str,
    &'static str,
);

#[rustfmt::skip]
const ROWS: [Row; 20] = [
    (32, "NikoParda", "Female", "Harvard University", "PhD", "East Man", "Manager", 1979, "USA", "Single"),
    (35, "Sara Abraham", "Female", "Arcadia University", "Master's", "Owens", "Web Developer", 1980, "USA", "Single"),
    (36, "Sara Abraham", "Female", "Carolina University", "Master's", "Owens", "Web Developer", 1980, "USA", "Single"),
    (174, "David Ernox", "Male", "Michigan University", "Master's", "Qpass", "Java Developer", 1984, "USA", "Single"),
    (463, "Sara Abram", "Female", "Michigan University", "Master's", "AppNet", "Web Developer", 1985, "USA", "Single"),
    (1236, "Tom Banho", "Male", "Acaedia University", "Bachelor", "Xing", "Network Manager", 1979, "USA", "Married"),
    (2411, "Rose Milan", "Female", "Koln University", "PhD", "Axvert", "Manager", 1972, "USA", "Single"),
    (33, "Hanry Dabuo", "Male", "Dublin High school", "Diploma", "Sonic", "Secretary", 1970, "UK", "Married"),
    (34, "Rosa Morada", "Female", "Franklin High school", "Diploma", "Sonic", "Bookkeeping", 1974, "UK", "Married"),
    (163, "Charls Selvin", "Male", "Pietersburg University", "Bachelor", "Sony", "Accountant", 1979, "UK", "Married"),
    (4013, "SeolDiao", "Male", "Chester University", "Master's", "Maxtor", "Database Administrator", 1983, "France", "Single"),
    (4014, "Lore Parsan", "Female", "Pietersburg University", "Bachelor", "Sonic", "Database Administrator", 1982, "Spain", "Single"),
    (4023, "Carolin Wolf", "Female", "Franklin High school", "Diploma", "Sony", "Bookkeeping", 1979, "Germany", "Married"),
    (1081, "Alex Monata", "Male", "Lowa University", "Master's", "Sony", "Electrical Engineer", 1986, "UK", "Married"),
    (37, "Silvia Jacson", "Female", "Carolina University", "Bachelor", "MySpace", "Computer Data Clerk", 1978, "Australia", "Married"),
    (1187, "Shery Monaten", "Female", "Dublin High school", "Diploma", "MySpace", "Buyer", 1968, "Australia", "Single"),
    (1195, "Melina Diyana", "Female", "Pietersburg University", "PhD", "MySpace", "Call Center Assistant", 1989, "Australia", "Single"),
    (1234, "LinaEghose", "Female", "Gabelino High school", "Diploma", "Amgen", "Buyer", 1980, "Canada", "Single"),
    (1235, "MariyanaPlanta", "Female", "Iowa University", "Bachelor", "Amgen", "Electrical Engineer", 1987, "Canada", "Single"),
    (1237, "Toney Cazola", "Male", "Carolina University", "Bachelor", "Amgen", "Call center Operator", 1978, "Canada", "Single"),
];

const USA: [(u64, u64); 16] = [
    (35, 32),
    (35, 174),
    (35, 463),
    (35, 1236),
    (35, 2411),
    (36, 32),
    (36, 174),
    (36, 2411),
    (36, 463),
    (32, 2411),
    (32, 174),
    (174, 463),
    (1236, 2411),
    (463, 1236),
    (32, 1236),
    (174, 2411),
];
const EUROPE: [(u64, u64); 13] = [
    (33, 34),
    (33, 163),
    (33, 1081),
    (34, 163),
    (34, 4023),
    (163, 4014),
    (163, 1081),
    (4013, 4014),
    (4013, 4023),
    (4014, 4023),
    (1081, 4013),
    (34, 4014),
    (33, 4023),
];
const PACIFIC: [(u64, u64); 12] = [
    (37, 1187),
    (37, 1195),
    (37, 1237),
    (1187, 1195),
    (1187, 1234),
    (1195, 1235),
    (1234, 1235),
    (1234, 1237),
    (1235, 1237),
    (37, 1234),
    (1195, 1237),
    (1187, 1237),
];
const BRIDGES: [(u64, u64); 9] = [
    (32, 33),
    (1236, 163),
    (174, 1081),
    (2411, 4013),
    (463, 37),
    (36, 1237),
    (4014, 1195),
    (1081, 1235),
    (4023, 1187),
];

/// Pages and URLs each group shares; members take a rotating slice.
const GROUP_PAGES: [&[&str]; 3] = [
    &[
        "nytimes",
        "nba",
        "webdev-weekly",
        "silicon-valley-jobs",
        "javascript-daily",
        "harvard-alumni",
    ],
    &[
        "bbc-news",
        "premier-league",
        "euro-travel",
        "office-life",
        "sony-fans",
        "le-monde",
    ],
    &[
        "abc-australia",
        "cricket-au",
        "myspace-music",
        "amgen-careers",
        "toronto-events",
        "surf-report",
    ],
];
const GROUP_URLS: [&[&str]; 3] = [
    &[
        "https://news.example/us-election",
        "https://dev.example/css-grid",
        "https://jobs.example/web",
        "https://sport.example/finals",
    ],
    &[
        "https://news.example/brexit",
        "https://sport.example/derby",
        "https://travel.example/paris",
        "https://office.example/tips",
    ],
    &[
        "https://news.example/sydney",
        "https://music.example/charts",
        "https://travel.example/banff",
        "https://sport.example/ashes",
    ],
];

/// Extra overlap between 35 and 36, who share an employer and most of a
/// profile.
const SHARED_35_36_PAGES: [&str; 4] = ["owens-staff", "frontend-masters", "css-tricks", "sara-fan-club"];
const SHARED_35_36_URLS: [&str; 2] = ["https://owens.example/team", "https://blog.example/react-hooks"];

fn profile(row: &Row) -> AttributeProfile {
    let (_, name, gender, school, degree, employer, position, year, location, relationship) = *row;
    AttributeProfile {
        name: name.to_owned(),
        gender: Some(gender.to_owned()),
        school: Some(school.to_owned()),
        degree: Some(degree.to_owned()),
        employer: Some(employer.to_owned()),
        position: Some(position.to_owned()),
        birth_year: Some(year),
        location: Some(location.to_owned()),
        relationship: Some(relationship.to_owned()),
    }
}

/// The 20-user network: published attribute rows, 50 friendships, and
/// interaction, page-like and URL data giving genuine friends dense overlap.
pub fn build_fixture20() -> SocialGraph {
    let mut b = GraphBuilder::new();
    for row in &ROWS {
        b.add_node(NodeId(row.0), profile(row))
            .expect("fixture ids are distinct");
    }
    for (group, edges) in [&USA[..], &EUROPE[..], &PACIFIC[..]].into_iter().enumerate() {
        for &(x, y) in edges {
            b.add_edge(NodeId(x), NodeId(y)).add_interaction(NodeId(x), NodeId(y));
        }
        let members: Vec<u64> = ROWS[group_bounds(group)].iter().map(|r| r.0).collect();
        for (k, &m) in members.iter().enumerate() {
            let pages = GROUP_PAGES[group];
            for p in 0..4 {
                b.add_page_like(NodeId(m), pages[(k + p) % pages.len()]);
            }
            let urls = GROUP_URLS[group];
            for u in 0..2 {
                b.add_url(NodeId(m), urls[(k + u) % urls.len()]);
            }
        }
    }
    for &(x, y) in &BRIDGES {
        b.add_edge(NodeId(x), NodeId(y));
    }
    for id in [35, 36] {
        for p in SHARED_35_36_PAGES {
            b.add_page_like(NodeId(id), p);
        }
        for u in SHARED_35_36_URLS {
            b.add_url(NodeId(id), u);
        }
    }
    b.build().expect("fixture edges reference declared nodes")
}

fn group_bounds(group: usize) -> std::ops::Range<usize> {
    match group {
        0 => 0..7,
        1 => 7..14,
        _ => 14..20,
    }
}

/// Seed under which the clone befriends 32, 174, 1236 and 2411.
pub const FIXTURE_CLONE_SEED: u64 = 2;

/// The forged copy of user 35: identical profile except Degree "Bachelor",
/// four of the victim's five friends, little interaction, and a thin slice
/// of the victim's page likes.
pub fn fixture_clone_spec() -> CloneInjectionSpec {
    CloneInjectionSpec {
        victim: NodeId(35),
        attribute_perturbations: vec![Perturbation {
            field: Attribute::Degree,
            value: Some("Bachelor".into()),
        }],
        friend_fraction: 0.8,
        interaction_fraction: 0.25,
        like_overlap: 0.25,
        url_overlap: 0.0,
        seed: FIXTURE_CLONE_SEED,
    }
}

/// [`build_fixture20`] with the clone of 35 injected; returns the clone id.
pub fn build_fixture20_with_clone() -> Result<(SocialGraph, NodeId)> {
    inject_clone(&build_fixture20(), &fixture_clone_spec())
}
