//! Combinatorial fractal descriptions: parsing and axiom validation.
//!
//! A fractal is given purely combinatorially: `k` cell maps, `N` boundary
//! fixed points, and glue rules saying which cell corners coincide. The file
//! grammar is line-oriented:
//!
//! ```text
//! # comment
//! fractal <name>
//! cells <k>
//! boundary <N>
//! glue <i>.<j> = <i'>.<j'>
//! ```

use crate::levels::LevelVertices;
use crate::word::Word;
use std::fmt;
use thiserror::Error;

/// One corner of one cell: the image of boundary point `corner` under cell
/// map `cell` (both 0-based).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CellCorner {
    pub cell: u16,
    pub corner: u16,
}

impl CellCorner {
    pub fn display(&self) -> String {
        format!("{}.{}", self.cell + 1, self.corner + 1)
    }
}

/// An unordered identification of two cell corners, stored with the smaller
/// corner first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Glue {
    pub a: CellCorner,
    pub b: CellCorner,
}

impl Glue {
    pub fn new(x: CellCorner, y: CellCorner) -> Self {
        if x <= y {
            Glue { a: x, b: y }
        } else {
            Glue { a: y, b: x }
        }
    }
}

/// A parsed fractal description. Parsing enforces structural sanity (index
/// ranges, no same-cell glue, no duplicate glue); the axioms live in
/// [`FractalSpec::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractalSpec {
    name: String,
    cell_count: usize,
    boundary_count: usize,
    glues: Vec<Glue>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate glue")]
    DuplicateGlue { line: usize },
    #[error("line {line}: glue joins two corners of the same cell")]
    NonInjectiveGlue { line: usize },
    #[error("line {line}: {what} index {found} out of range 1..={max}")]
    IndexOutOfRange {
        line: usize,
        what: &'static str,
        found: usize,
        max: usize,
    },
    #[error("missing `{0}` declaration")]
    MissingHeader(&'static str),
    #[error("line {line}: `{header}` declared twice")]
    DuplicateHeader { line: usize, header: &'static str },
    #[error("cell count must be at least 2, got {0}")]
    BadCellCount(usize),
    #[error("boundary count must satisfy 2 <= N <= k, got N={n}, k={k}")]
    BadBoundaryCount { n: usize, k: usize },
}

/// Parses a fractal description file. Axioms are not checked here.
pub fn parse_spec(text: &str) -> Result<FractalSpec, SpecParseError> {
    let mut name: Option<String> = None;
    let mut cells: Option<usize> = None;
    let mut boundary: Option<usize> = None;
    let mut glues: Vec<(usize, Glue)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match keyword {
            "fractal" => {
                if name.is_some() {
                    return Err(SpecParseError::DuplicateHeader {
                        line: line_no,
                        header: "fractal",
                    });
                }
                if rest.is_empty() {
                    return Err(SpecParseError::Syntax {
                        line: line_no,
                        message: "expected a fractal name".into(),
                    });
                }
                name = Some(rest.to_owned());
            }
            "cells" => {
                if cells.is_some() {
                    return Err(SpecParseError::DuplicateHeader {
                        line: line_no,
                        header: "cells",
                    });
                }
                cells = Some(parse_count(rest, line_no, "cell count")?);
            }
            "boundary" => {
                if boundary.is_some() {
                    return Err(SpecParseError::DuplicateHeader {
                        line: line_no,
                        header: "boundary",
                    });
                }
                boundary = Some(parse_count(rest, line_no, "boundary count")?);
            }
            "glue" => {
                let k = cells.ok_or(SpecParseError::MissingHeader("cells"))?;
                let n = boundary.ok_or(SpecParseError::MissingHeader("boundary"))?;
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| SpecParseError::Syntax {
                    line: line_no,
                    message: "expected `glue <i>.<j> = <i'>.<j'>`".into(),
                })?;
                let a = parse_corner(lhs, line_no, k, n)?;
                let b = parse_corner(rhs, line_no, k, n)?;
                if a.cell == b.cell {
                    return Err(SpecParseError::NonInjectiveGlue { line: line_no });
                }
                glues.push((line_no, Glue::new(a, b)));
            }
            _ => {
                return Err(SpecParseError::Syntax {
                    line: line_no,
                    message: format!("unknown keyword `{keyword}`"),
                });
            }
        }
    }

    let name = name.ok_or(SpecParseError::MissingHeader("fractal"))?;
    let cell_count = cells.ok_or(SpecParseError::MissingHeader("cells"))?;
    let boundary_count = boundary.ok_or(SpecParseError::MissingHeader("boundary"))?;
    if cell_count < 2 {
        return Err(SpecParseError::BadCellCount(cell_count));
    }
    if boundary_count < 2 || boundary_count > cell_count {
        return Err(SpecParseError::BadBoundaryCount {
            n: boundary_count,
            k: cell_count,
        });
    }

    let mut seen = std::collections::BTreeSet::new();
    for (line, glue) in &glues {
        if !seen.insert(*glue) {
            return Err(SpecParseError::DuplicateGlue { line: *line });
        }
    }
    let mut glue_list: Vec<Glue> = glues.into_iter().map(|(_, g)| g).collect();
    glue_list.sort();

    Ok(FractalSpec {
        name,
        cell_count,
        boundary_count,
        glues: glue_list,
    })
}

fn parse_count(text: &str, line: usize, what: &str) -> Result<usize, SpecParseError> {
    text.trim().parse().map_err(|_| SpecParseError::Syntax {
        line,
        message: format!("expected an integer {what}"),
    })
}

fn parse_corner(
    text: &str,
    line: usize,
    k: usize,
    n: usize,
) -> Result<CellCorner, SpecParseError> {
    let syntax = || SpecParseError::Syntax {
        line,
        message: format!("expected `<i>.<j>`, got `{}`", text.trim()),
    };
    let (i, j) = text.trim().split_once('.').ok_or_else(syntax)?;
    let i: usize = i.trim().parse().map_err(|_| syntax())?;
    let j: usize = j.trim().parse().map_err(|_| syntax())?;
    if i < 1 || i > k {
        return Err(SpecParseError::IndexOutOfRange {
            line,
            what: "cell",
            found: i,
            max: k,
        });
    }
    if j < 1 || j > n {
        return Err(SpecParseError::IndexOutOfRange {
            line,
            what: "boundary",
            found: j,
            max: n,
        });
    }
    Ok(CellCorner {
        cell: (i - 1) as u16,
        corner: (j - 1) as u16,
    })
}

impl FractalSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    pub fn glues(&self) -> &[Glue] {
        &self.glues
    }

    /// Checks the axioms and reports each one; never fails hard, so the CLI
    /// can explain malformed inputs.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();

        // A glue touching an address of the form (j,j) would identify a cell
        // image of a boundary point with a boundary point itself.
        let mut offenders = Vec::new();
        for glue in &self.glues {
            for corner in [glue.a, glue.b] {
                if corner.cell == corner.corner {
                    offenders.push(format!(
                        "glue {} = {} touches boundary point {}",
                        glue.a.display(),
                        glue.b.display(),
                        corner.corner + 1
                    ));
                }
            }
        }
        checks.push(Check {
            name: "boundary-image",
            passed: offenders.is_empty(),
            detail: if offenders.is_empty() {
                "no glue touches a boundary fixed point".to_owned()
            } else {
                offenders.join("; ")
            },
        });

        let level1 = LevelVertices::build(self, 1).expect("level 1 always fits");
        let k = self.cell_count;
        let n = self.boundary_count;

        // Corner sets per 1-cell, after closure.
        let mut cell_sets: Vec<Vec<u32>> = Vec::with_capacity(k);
        for i in 0..k {
            let mut set: Vec<u32> = (0..n)
                .map(|j| {
                    level1
                        .canonicalize(&crate::word::Address::new(
                            Word::from_letters(vec![i as u16]),
                            j as u16,
                        ))
                        .expect("level matches")
                        .class
                })
                .collect();
            set.sort_unstable();
            set.dedup();
            cell_sets.push(set);
        }

        let injective = cell_sets.iter().enumerate().filter(|(_, s)| s.len() < n);
        let bad: Vec<String> = injective
            .map(|(i, s)| format!("cell {} has only {} distinct corners", i + 1, s.len()))
            .collect();
        checks.push(Check {
            name: "injectivity",
            passed: bad.is_empty(),
            detail: if bad.is_empty() {
                format!("every 1-cell has {n} distinct corners")
            } else {
                bad.join("; ")
            },
        });

        let mut overlaps = Vec::new();
        for i in 0..k {
            for i2 in (i + 1)..k {
                let common = intersection_size(&cell_sets[i], &cell_sets[i2]);
                if common > 1 {
                    overlaps.push(format!(
                        "cells {} and {} share {} points",
                        i + 1,
                        i2 + 1,
                        common
                    ));
                }
            }
        }
        checks.push(Check {
            name: "cell-intersections",
            passed: overlaps.is_empty(),
            detail: if overlaps.is_empty() {
                "any two distinct 1-cells share at most one point".to_owned()
            } else {
                overlaps.join("; ")
            },
        });

        // Connectedness in the level-1 mesh: steps must stay inside a common
        // 1-cell, so each cell's corner set forms a clique.
        let mut uf = crate::levels::UnionFind::new(level1.vertex_count());
        for set in &cell_sets {
            for w in set.windows(2) {
                uf.union(w[0] as usize, w[1] as usize);
            }
        }
        let connected = (0..level1.vertex_count())
            .map(|c| uf.find(c))
            .collect::<std::collections::BTreeSet<_>>()
            .len()
            <= 1;
        checks.push(Check {
            name: "connectedness",
            passed: connected,
            detail: if connected {
                "the level-1 mesh is connected".to_owned()
            } else {
                "the level-1 mesh splits into several components".to_owned()
            },
        });

        ValidationReport { checks }
    }
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// One axiom check with a human-readable outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The outcome of [`FractalSpec::validate`]; passes overall iff every check
/// passes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if check.passed { "pass" } else { "FAIL" },
                check.name,
                check.detail
            )?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GASKET: &str = "\
fractal gasket
cells 3
boundary 3
glue 1.2 = 2.1
glue 1.3 = 3.1
glue 2.3 = 3.2
";

    #[test]
    fn parses_gasket() {
        let spec = parse_spec(GASKET).unwrap();
        assert_eq!(spec.name(), "gasket");
        assert_eq!(spec.cell_count(), 3);
        assert_eq!(spec.boundary_count(), 3);
        assert_eq!(spec.glues().len(), 3);
    }

    #[test]
    fn parses_interval() {
        let spec = parse_spec("fractal interval\ncells 2\nboundary 2\nglue 1.2 = 2.1\n").unwrap();
        assert_eq!(spec.cell_count(), 2);
        assert_eq!(spec.boundary_count(), 2);
        assert_eq!(spec.glues().len(), 1);
    }

    #[test]
    fn rejects_same_cell_glue() {
        let err = parse_spec("fractal x\ncells 3\nboundary 3\nglue 1.2 = 1.3\n").unwrap_err();
        assert_eq!(err, SpecParseError::NonInjectiveGlue { line: 4 });
    }

    #[test]
    fn rejects_duplicate_glue() {
        let err = parse_spec(
            "fractal x\ncells 3\nboundary 3\nglue 1.2 = 2.1\nglue 2.1 = 1.2\n",
        )
        .unwrap_err();
        assert_eq!(err, SpecParseError::DuplicateGlue { line: 5 });
    }

    #[test]
    fn rejects_out_of_range_indices() {
        let err = parse_spec("fractal x\ncells 2\nboundary 2\nglue 1.2 = 3.1\n").unwrap_err();
        assert!(matches!(err, SpecParseError::IndexOutOfRange { line: 4, .. }));
    }

    #[test]
    fn reports_syntax_error_with_line_number() {
        let err = parse_spec("fractal x\ncells 2\nboundary 2\nglue 1.2 - 2.1\n").unwrap_err();
        assert!(matches!(err, SpecParseError::Syntax { line: 4, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let spec = parse_spec(
            "# header\nfractal x\n\ncells 2\nboundary 2\nglue 1.2 = 2.1 # midpoint\n",
        )
        .unwrap();
        assert_eq!(spec.glues().len(), 1);
    }

    #[test]
    fn validates_gasket() {
        let spec = parse_spec(GASKET).unwrap();
        let report = spec.validate();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn unglued_pair_of_cells_is_disconnected() {
        let spec = parse_spec("fractal cantor\ncells 2\nboundary 2\n").unwrap();
        let report = spec.validate();
        assert!(!report.passed());
        assert!(!report.check("connectedness").unwrap().passed);
        assert!(report.check("cell-intersections").unwrap().passed);
    }

    #[test]
    fn extra_glue_makes_two_cells_share_two_points() {
        let text = format!("{GASKET}glue 1.2 = 3.1\n");
        let spec = parse_spec(&text).unwrap();
        let report = spec.validate();
        assert!(!report.passed());
        assert!(!report.check("cell-intersections").unwrap().passed);
    }

    #[test]
    fn glue_touching_fixed_point_fails_boundary_image_check() {
        let spec = parse_spec("fractal x\ncells 2\nboundary 2\nglue 1.1 = 2.1\n").unwrap();
        let report = spec.validate();
        assert!(!report.check("boundary-image").unwrap().passed);
    }
}
