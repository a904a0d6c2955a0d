//! Polygon file formats.
//!
//! JSON: `{"vertices": [[x, y], ...]}` with an optional `"name"` string.
//! CSV: one `x,y` pair per line; a non-numeric first line is treated as a
//! header. Files ending in `.json` (or starting with `{`) parse as JSON,
//! anything else as CSV.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::polygon::{Point2, Polygon, PolygonError};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

#[derive(Deserialize)]
struct PolygonJson {
    vertices: Vec<[f64; 2]>,
    #[serde(default)]
    name: Option<String>,
}

pub fn parse_polygon_json(text: &str, eps: f64) -> Result<(Polygon, Option<String>), FileError> {
    let parsed: PolygonJson =
        serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;
    let vertices = parsed
        .vertices
        .into_iter()
        .map(|[x, y]| Point2::new(x, y))
        .collect();
    Ok((Polygon::new(vertices, eps)?, parsed.name))
}

pub fn parse_polygon_csv(text: &str, eps: f64) -> Result<Polygon, FileError> {
    let mut vertices = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed = if fields.len() == 2 {
            match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => Some(Point2::new(x, y)),
                _ => None,
            }
        } else {
            None
        };
        match parsed {
            Some(p) => vertices.push(p),
            None if lineno == 0 => continue, // header
            None => {
                return Err(FileError::Parse(format!(
                    "line {}: expected `x,y`, got `{trimmed}`",
                    lineno + 1
                )))
            }
        }
    }
    Ok(Polygon::new(vertices, eps)?)
}

/// Reads a polygon from disk, dispatching on extension and content.
pub fn read_polygon_file(path: &Path, eps: f64) -> Result<(Polygon, Option<String>), FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let looks_json = path.extension().is_some_and(|e| e == "json")
        || text.trim_start().starts_with('{');
    if looks_json {
        parse_polygon_json(&text, eps)
    } else {
        Ok((parse_polygon_csv(&text, eps)?, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::DEFAULT_EPS;

    #[test]
    fn json_round_trip() {
        let (p, name) = parse_polygon_json(
            r#"{"vertices": [[0,0],[2,0],[2,1],[0,1]], "name": "rectangle"}"#,
            DEFAULT_EPS,
        )
        .unwrap();
        assert_eq!(p.n(), 4);
        assert_eq!(name.as_deref(), Some("rectangle"));

        assert!(matches!(
            parse_polygon_json("{\"vertices\": []}", DEFAULT_EPS),
            Err(FileError::Polygon(PolygonError::TooFewVertices(0)))
        ));
        assert!(matches!(
            parse_polygon_json("not json", DEFAULT_EPS),
            Err(FileError::Parse(_))
        ));
    }

    #[test]
    fn csv_with_and_without_header() {
        let with_header = "x,y\n0,0\n2,0\n2,1\n0,1\n";
        let p = parse_polygon_csv(with_header, DEFAULT_EPS).unwrap();
        assert_eq!(p.n(), 4);

        let without = "0,0\n2,0\n2,1\n0,1\n";
        let q = parse_polygon_csv(without, DEFAULT_EPS).unwrap();
        assert_eq!(q.vertices(), p.vertices());

        assert!(matches!(
            parse_polygon_csv("0,0\nbroken\n1,1\n", DEFAULT_EPS),
            Err(FileError::Parse(_))
        ));
    }
}
