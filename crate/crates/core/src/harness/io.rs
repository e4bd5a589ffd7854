//! Mesh and point-cloud files.
//!
//! `p4m` is a line-oriented text format:
//!
//! ```text
//! p4m 1
//! vertices N
//! x y z t          (N lines)
//! pentatopes M
//! i0 i1 i2 i3 i4   (M lines, zero-based)
//! ```
//!
//! Coordinates use Rust's shortest round-trip decimal form, so parsing a
//! written file reproduces every `f64` bit for bit. A point file is the same
//! format with the `pentatopes` section omitted. `tet3` lists the five
//! tetrahedral facets of every pentatope after projecting to 3D.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point4, FACET_LOCAL};
use crate::mesh::{Mesh4, VertexId};

use super::project_to_3d;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Writes the alive part of `mesh` (see [`Mesh4::compacted`]).
pub fn write_p4m(mesh: &Mesh4) -> String {
    let m = mesh.compacted();
    let mut out = String::new();
    writeln!(out, "p4m 1").unwrap();
    writeln!(out, "vertices {}", m.n_vertices()).unwrap();
    for p in m.vertices() {
        writeln!(out, "{} {} {} {}", p.x, p.y, p.z, p.t).unwrap();
    }
    writeln!(out, "pentatopes {}", m.n_alive_elements()).unwrap();
    for e in m.alive_elements() {
        let v = m.element(e);
        writeln!(out, "{} {} {} {} {}", v[0], v[1], v[2], v[3], v[4]).unwrap();
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Some((i + 1, l));
            }
        }
        None
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        Lines {
            inner: self.inner.clone(),
            last: self.last,
        }
        .next()
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next().ok_or_else(|| {
            parse_err(
                self.last + 1,
                format!("unexpected end of file, expected {what}"),
            )
        })
    }
}

fn header_count(lines: &mut Lines, keyword: &str) -> Result<usize> {
    let (n, l) = lines.expect(keyword)?;
    let mut it = l.split_whitespace();
    if it.next() != Some(keyword) {
        return Err(parse_err(
            n,
            format!("expected `{keyword} <count>`, found `{l}`"),
        ));
    }
    let count = it
        .next()
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| parse_err(n, format!("bad {keyword} count")))?;
    if it.next().is_some() {
        return Err(parse_err(n, "trailing tokens"));
    }
    Ok(count)
}

fn parse_fields<T: std::str::FromStr>(n: usize, l: &str, k: usize, what: &str) -> Result<Vec<T>> {
    let vals: Vec<T> = l
        .split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|_| parse_err(n, format!("invalid {what} `{s}`")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != k {
        return Err(parse_err(
            n,
            format!("expected {k} {what}s, found {}", vals.len()),
        ));
    }
    Ok(vals)
}

/// Parses vertices and (optionally) pentatopes.
fn parse_p4m_parts(
    text: &str,
    require_elements: bool,
) -> Result<(Vec<Point4>, Vec<[VertexId; 5]>, Vec<usize>)> {
    let mut lines = Lines::new(text);
    let (n, l) = lines.expect("header")?;
    if l.split_whitespace().collect::<Vec<_>>() != ["p4m", "1"] {
        return Err(parse_err(n, format!("expected `p4m 1`, found `{l}`")));
    }
    let nv = header_count(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.expect("a vertex")?;
        let c: Vec<f64> = parse_fields(n, l, 4, "coordinate")?;
        if c.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(n, "non-finite coordinate"));
        }
        vertices.push(Point4::new(c[0], c[1], c[2], c[3]));
    }
    let mut elements = Vec::new();
    let mut element_lines = Vec::new();
    if lines.peek().is_some() || require_elements {
        let ne = header_count(&mut lines, "pentatopes")?;
        for _ in 0..ne {
            let (n, l) = lines.expect("a pentatope")?;
            let v: Vec<VertexId> = parse_fields(n, l, 5, "vertex index")?;
            if let Some(bad) = v.iter().find(|&&i| i as usize >= nv) {
                return Err(parse_err(
                    n,
                    format!("vertex index {bad} out of range (mesh has {nv} vertices)"),
                ));
            }
            elements.push([v[0], v[1], v[2], v[3], v[4]]);
            element_lines.push(n);
        }
    }
    if let Some((n, l)) = lines.next() {
        return Err(parse_err(n, format!("unexpected content `{l}`")));
    }
    Ok((vertices, elements, element_lines))
}

/// Parses a `p4m` mesh. Negatively oriented tuples are reoriented; a
/// degenerate or non-manifold element is reported on its own line.
pub fn read_p4m(text: &str) -> Result<Mesh4> {
    let (vertices, elements, lines) = parse_p4m_parts(text, true)?;
    let mut mesh = Mesh4::new();
    for p in vertices {
        mesh.add_vertex(p, false);
    }
    for (e, n) in elements.iter().zip(lines) {
        mesh.add_element(*e)
            .map_err(|err| parse_err(n, err.to_string()))?;
    }
    Ok(mesh)
}

/// Parses the vertices of a `p4m` file; a pentatope section, if present,
/// is validated and ignored.
pub fn read_p4m_points(text: &str) -> Result<Vec<Point4>> {
    parse_p4m_parts(text, false).map(|(v, _, _)| v)
}

/// Parses `x,y,z,t` rows. A non-numeric first row is treated as a header and
/// lines starting with `#` are skipped.
pub fn read_points_csv(text: &str) -> Result<Vec<Point4>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            parse_err(
                e.position().map_or(i + 1, |p| p.line() as usize),
                e.to_string(),
            )
        })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match vals {
            Ok(v) if v.len() == 4 && v.iter().all(|x| x.is_finite()) => {
                points.push(Point4::new(v[0], v[1], v[2], v[3]))
            }
            Ok(v) if v.len() != 4 => {
                return Err(parse_err(
                    line,
                    format!("expected 4 columns, found {}", v.len()),
                ))
            }
            Ok(_) => return Err(parse_err(line, "non-finite coordinate")),
            Err(_) if points.is_empty() && i == 0 => continue,
            Err(_) => {
                return Err(parse_err(
                    line,
                    format!(
                        "invalid number in `{}`",
                        rec.iter().collect::<Vec<_>>().join(",")
                    ),
                ))
            }
        }
    }
    Ok(points)
}

/// Reads points from a `.csv` file or a `p4m` file (any other extension).
pub fn read_points_file(path: &Path) -> Result<Vec<Point4>> {
    let text = std::fs::read_to_string(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        read_points_csv(&text)
    } else {
        read_p4m_points(&text)
    }
}

pub fn read_mesh_file(path: &Path) -> Result<Mesh4> {
    read_p4m(&std::fs::read_to_string(path)?)
}

/// Projected tetrahedral facets: `tet3 1`, `vertices N` with 3D
/// coordinates, then `tetrahedra 5M` with four zero-based indices each.
pub fn write_tet3(mesh: &Mesh4) -> String {
    let m = mesh.compacted();
    let mut out = String::new();
    writeln!(out, "tet3 1").unwrap();
    writeln!(out, "vertices {}", m.n_vertices()).unwrap();
    for p in m.vertices() {
        let [x, y, z] = project_to_3d(*p);
        writeln!(out, "{x} {y} {z}").unwrap();
    }
    writeln!(out, "tetrahedra {}", 5 * m.n_alive_elements()).unwrap();
    for e in m.alive_elements() {
        let v = m.element(e);
        for local in FACET_LOCAL {
            let f = local.map(|i| v[i]);
            writeln!(out, "{} {} {} {}", f[0], f[1], f[2], f[3]).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_only_file() {
        let p = read_p4m_points("p4m 1\nvertices 2\n0 0 0 0\n1 2 3 4\n").unwrap();
        assert_eq!(p[1], Point4::new(1.0, 2.0, 3.0, 4.0));
    }

    #[test]
    fn csv_with_header_and_comments() {
        let p = read_points_csv("x,y,z,t\n# comment\n0,0,0,0\n 1 , 2 , 3 , 4 \n").unwrap();
        assert_eq!(p, vec![Point4::ORIGIN, Point4::new(1.0, 2.0, 3.0, 4.0)]);
        let e = read_points_csv("0,0,0,0\n1,2,x,4\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn truncated_file_names_the_missing_line() {
        let e = read_p4m("p4m 1\nvertices 2\n0 0 0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
    }
}
