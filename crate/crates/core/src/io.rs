//! JSON file formats for families, integer sets and colorings.
//!
//! ```text
//! family   {"n": 3, "sets": [[], [1], [1, 2]]}
//! int set  {"n": 8, "elements": [0, 1, 3]}
//! coloring {"n": 2, "r": 2, "colors": [0, 1, 1, 0]}
//! ```
//!
//! Errors name the offending field as a path such as `sets[2][0]`, and
//! syntax errors carry the line and column.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cubes::IntSet;
use crate::error::{Error, Result};
use crate::lattice::{SetFamily, SubsetCode, MAX_GROUND};
use crate::ramsey::Coloring;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    n: usize,
    sets: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntSetFile {
    n: u64,
    elements: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ColoringFile {
    n: usize,
    r: u64,
    colors: Vec<u32>,
}

fn decode<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let at = format!("line {} column {}", inner.line(), inner.column());
        if path == "." {
            Error::InvalidInput(format!("{at}: {inner}"))
        } else {
            Error::InvalidInput(format!("{path} ({at}): {inner}"))
        }
    })
}

fn field(path: String, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{path}: {msg}"))
}

pub fn parse_family(text: &str) -> Result<SetFamily> {
    let file: FamilyFile = decode(text)?;
    if file.n > MAX_GROUND {
        return Err(field(
            "n".into(),
            format!("ground size exceeds {MAX_GROUND}"),
        ));
    }
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    let mut codes = Vec::with_capacity(file.sets.len());
    for (i, set) in file.sets.iter().enumerate() {
        for (j, &e) in set.iter().enumerate() {
            if e == 0 || e > file.n {
                return Err(field(
                    format!("sets[{i}][{j}]"),
                    format!("element {e} outside 1..={}", file.n),
                ));
            }
            if j > 0 && set[j - 1] >= e {
                return Err(field(
                    format!("sets[{i}][{j}]"),
                    "elements must be strictly ascending",
                ));
            }
        }
        let code = SubsetCode::from_elements(set.iter().copied());
        if let Some(first) = seen.insert(code.bits(), i) {
            return Err(field(
                format!("sets[{i}]"),
                format!("duplicate of sets[{first}]"),
            ));
        }
        codes.push(code);
    }
    SetFamily::new(file.n, codes)
}

pub fn parse_int_set(text: &str) -> Result<IntSet> {
    let file: IntSetFile = decode(text)?;
    for (i, &e) in file.elements.iter().enumerate() {
        if e > file.n {
            return Err(field(
                format!("elements[{i}]"),
                format!("{e} exceeds n = {}", file.n),
            ));
        }
        if i > 0 && file.elements[i - 1] >= e {
            return Err(field(
                format!("elements[{i}]"),
                "elements must be strictly ascending",
            ));
        }
    }
    IntSet::new(file.n, file.elements)
}

pub fn parse_coloring(text: &str) -> Result<Coloring> {
    let file: ColoringFile = decode(text)?;
    if file.n > crate::ramsey::MAX_COLORING_N {
        return Err(field(
            "n".into(),
            format!(
                "colorings are limited to n <= {}",
                crate::ramsey::MAX_COLORING_N
            ),
        ));
    }
    if file.colors.len() != 1usize << file.n {
        return Err(field(
            "colors".into(),
            format!(
                "expected {} entries, found {}",
                1usize << file.n,
                file.colors.len()
            ),
        ));
    }
    if let Some(i) = file.colors.iter().position(|&c| u64::from(c) >= file.r) {
        return Err(field(
            format!("colors[{i}]"),
            format!("color {} is not below r = {}", file.colors[i], file.r),
        ));
    }
    Coloring::new(file.n, file.r, file.colors)
}

pub fn family_to_json(f: &SetFamily) -> String {
    serde_json::to_string(f).expect("families serialize")
}

#[derive(Serialize)]
struct IntSetOut<'a> {
    n: u64,
    elements: &'a [u64],
}

#[derive(Serialize)]
struct ColoringOut<'a> {
    n: usize,
    r: u64,
    colors: &'a [u32],
}

pub fn int_set_to_json(h: &IntSet) -> String {
    serde_json::to_string(&IntSetOut {
        n: h.n(),
        elements: h.elements(),
    })
    .expect("integer sets serialize")
}

pub fn coloring_to_json(c: &Coloring) -> String {
    serde_json::to_string(&ColoringOut {
        n: c.n(),
        r: c.r(),
        colors: c.colors(),
    })
    .expect("colorings serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(r: Result<impl std::fmt::Debug>) -> String {
        match r {
            Err(Error::InvalidInput(m)) => m,
            other => panic!("expected InvalidInput, got {other:?}"),
        }
    }

    #[test]
    fn family_round_trip() {
        let f = parse_family(r#"{"n": 3, "sets": [[], [1], [1, 2]]}"#).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(family_to_json(&f), r#"{"n":3,"sets":[[],[1],[1,2]]}"#);
        assert_eq!(parse_family(&family_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn family_diagnostics() {
        let m = err(parse_family(r#"{"n": 2, "sets": [[1], [3]]}"#));
        assert!(m.starts_with("sets[1][0]"), "{m}");
        let m = err(parse_family(r#"{"n": 2, "sets": [[1, 2], [2, 1]]}"#));
        assert!(m.starts_with("sets[1][1]"), "{m}");
        let m = err(parse_family(r#"{"n": 2, "sets": [[1], [2], [1]]}"#));
        assert_eq!(m, "sets[2]: duplicate of sets[0]");
        let m = err(parse_family("{\"n\": 2,\n \"sets\": [[1], [\"x\"]]}"));
        assert!(m.contains("sets[1][0]") && m.contains("line 2"), "{m}");
        let m = err(parse_family(r#"{"n": 2, "sets": [], "extra": 1}"#));
        assert!(m.contains("extra"), "{m}");
        assert!(parse_family("{").is_err());
    }

    #[test]
    fn int_set_and_coloring() {
        let h = parse_int_set(r#"{"n": 8, "elements": [0, 1, 3]}"#).unwrap();
        assert_eq!(h.elements(), &[0, 1, 3]);
        assert_eq!(int_set_to_json(&h), r#"{"n":8,"elements":[0,1,3]}"#);
        assert!(err(parse_int_set(r#"{"n": 2, "elements": [0, 5]}"#)).starts_with("elements[1]"));

        let c = parse_coloring(r#"{"n": 2, "r": 2, "colors": [0, 1, 1, 0]}"#).unwrap();
        assert_eq!(parse_coloring(&coloring_to_json(&c)).unwrap(), c);
        assert!(err(parse_coloring(r#"{"n": 2, "r": 2, "colors": [0, 1]}"#)).starts_with("colors"));
        assert!(
            err(parse_coloring(r#"{"n": 1, "r": 2, "colors": [0, 2]}"#)).starts_with("colors[1]")
        );
    }
}
