//! Knot diagrams and quandle coloring counts.
//!
//! A diagram is a list of arcs and signed crossings. A coloring assigns a
//! quandle element to every arc so that at each crossing the under-out arc
//! is the under-in arc acted on by the over arc:
//!
//! ```text
//! sign +:  color(under_out) = color(under_in) *    color(over)
//! sign -:  color(under_out) = color(under_in) *^-1 color(over)
//! ```
//!
//! The count of such labelings is invariant across diagrams of the same
//! knot. Diagrams are taken as given; no move engine is provided.
//!
//! Text format (bit-exact): first line `arcs <N>`, then one line per
//! crossing, `<sign> <over> <under_in> <under_out>` with sign `+` or `-`
//! and 0-based arc indices.

use thiserror::Error;

use crate::quandle::{right_inverse, FiniteQuandle};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("arc {arc} out of range (diagram has {arc_count} arcs) at line {line}")]
    ArcOutOfRange {
        line: usize,
        arc: usize,
        arc_count: usize,
    },
    #[error("unknown builtin knot `{0}`")]
    UnknownBuiltin(String),
}

/// One crossing: the over arc and the under strand entering and leaving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub sign: i8,
    pub over: usize,
    pub under_in: usize,
    pub under_out: usize,
}

/// A knot diagram: `arc_count` arcs indexed from 0 and a crossing list.
/// A classical diagram with `c >= 1` crossings has exactly `c` arcs; one
/// arc with no crossings encodes the unknot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotDiagram {
    arc_count: usize,
    crossings: Vec<Crossing>,
    name: Option<String>,
}

impl KnotDiagram {
    pub fn new(arc_count: usize, crossings: Vec<Crossing>) -> Result<Self, DiagramError> {
        for (k, c) in crossings.iter().enumerate() {
            // Line k+2 is where crossing k would sit in the text format.
            for arc in [c.over, c.under_in, c.under_out] {
                if arc >= arc_count {
                    return Err(DiagramError::ArcOutOfRange {
                        line: k + 2,
                        arc,
                        arc_count,
                    });
                }
            }
        }
        Ok(KnotDiagram {
            arc_count,
            crossings,
            name: None,
        })
    }

    fn named(arc_count: usize, crossings: Vec<Crossing>, name: &str) -> Self {
        let mut d = KnotDiagram::new(arc_count, crossings).expect("builtin diagrams are valid");
        d.name = Some(name.to_string());
        d
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Stable identifier used in coloring reports.
    pub fn describe(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("{} arcs, {} crossings", self.arc_count, self.crossings.len()),
        }
    }
}

/// Tokens with their 1-based column positions.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut column = 0usize;
    let mut start: Option<(usize, usize)> = None; // (column, byte offset)
    for (offset, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some((col, begin)) = start.take() {
                out.push((col, &line[begin..offset]));
            }
        } else if start.is_none() {
            start = Some((column, offset));
        }
    }
    if let Some((col, begin)) = start {
        out.push((col, &line[begin..]));
    }
    out
}

/// Parses the crossing-list text format.
pub fn parse_diagram(text: &str) -> Result<KnotDiagram, DiagramError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (first_no, first) = lines.next().ok_or_else(|| DiagramError::Syntax {
        line: 1,
        column: 1,
        message: "empty input; expected `arcs <N>`".into(),
    })?;
    let head = tokenize(first);
    if head.first().map(|&(_, t)| t) != Some("arcs") {
        return Err(DiagramError::Syntax {
            line: first_no,
            column: head.first().map_or(1, |&(c, _)| c),
            message: "expected keyword `arcs`".into(),
        });
    }
    let &(count_col, count_tok) = head.get(1).ok_or_else(|| DiagramError::Syntax {
        line: first_no,
        column: first.chars().count() + 1,
        message: "expected arc count after `arcs`".into(),
    })?;
    let arc_count: usize = count_tok.parse().map_err(|_| DiagramError::Syntax {
        line: first_no,
        column: count_col,
        message: "arc count must be a nonnegative integer".into(),
    })?;
    if let Some(&(col, extra)) = head.get(2) {
        return Err(DiagramError::Syntax {
            line: first_no,
            column: col,
            message: format!("unexpected token `{extra}`"),
        });
    }

    let mut crossings = Vec::new();
    for (line_no, line) in lines {
        let tokens = tokenize(line);
        if tokens.len() != 4 {
            return Err(DiagramError::Syntax {
                line: line_no,
                column: 1,
                message: format!(
                    "expected `<sign> <over> <under_in> <under_out>`, found {} tokens",
                    tokens.len()
                ),
            });
        }
        let sign = match tokens[0].1 {
            "+" => 1i8,
            "-" => -1i8,
            other => {
                return Err(DiagramError::Syntax {
                    line: line_no,
                    column: tokens[0].0,
                    message: format!("sign must be `+` or `-`, found `{other}`"),
                })
            }
        };
        let mut arcs = [0usize; 3];
        for (slot, &(col, tok)) in arcs.iter_mut().zip(&tokens[1..]) {
            let value: usize = tok.parse().map_err(|_| DiagramError::Syntax {
                line: line_no,
                column: col,
                message: format!("arc index must be a nonnegative integer, found `{tok}`"),
            })?;
            if value >= arc_count {
                return Err(DiagramError::ArcOutOfRange {
                    line: line_no,
                    arc: value,
                    arc_count,
                });
            }
            *slot = value;
        }
        crossings.push(Crossing {
            sign,
            over: arcs[0],
            under_in: arcs[1],
            under_out: arcs[2],
        });
    }

    KnotDiagram::new(arc_count, crossings)
}

/// Built-in diagrams: `unknot`, `trefoil`, `trefoil_alt`, `figure_eight`.
///
/// `trefoil_alt` is the trefoil with one kink added (4 crossings), kept
/// for invariance testing; `figure_eight` is the standard alternating
/// diagram read off a 3-strand braid, with two crossings of each sign.
pub fn builtin_knot(name: &str) -> Result<KnotDiagram, DiagramError> {
    let c = |sign: i8, over: usize, under_in: usize, under_out: usize| Crossing {
        sign,
        over,
        under_in,
        under_out,
    };
    match name {
        "unknot" => Ok(KnotDiagram::named(1, vec![], "unknot")),
        "trefoil" => Ok(KnotDiagram::named(
            3,
            vec![c(1, 2, 0, 1), c(1, 0, 1, 2), c(1, 1, 2, 0)],
            "trefoil",
        )),
        "trefoil_alt" => Ok(KnotDiagram::named(
            4,
            vec![
                c(1, 0, 0, 3), // the kink: forces color(3) = color(0)
                c(1, 2, 3, 1),
                c(1, 3, 1, 2),
                c(1, 1, 2, 0),
            ],
            "trefoil_alt",
        )),
        "figure_eight" => Ok(KnotDiagram::named(
            4,
            vec![
                c(1, 0, 1, 2),
                c(-1, 3, 0, 1),
                c(1, 2, 3, 0),
                c(-1, 1, 2, 3),
            ],
            "figure_eight",
        )),
        other => Err(DiagramError::UnknownBuiltin(other.to_string())),
    }
}

/// A coloring count report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringCount {
    pub quandle_size: usize,
    pub diagram: String,
    pub count: u128,
}

/// Counts the arc labelings of `d` by elements of `q` satisfying the
/// crossing rule, by backtracking with constraint propagation: assignments
/// are propagated through crossings whose over arc and one under arc are
/// colored, and branching is on the lowest-index uncolored arc.
pub fn count_colorings(d: &KnotDiagram, q: &FiniteQuandle) -> ColoringCount {
    let n = q.size();
    let inv = right_inverse(q);
    let arcs = d.arc_count();

    // Crossings touching each arc, for propagation.
    let mut adjacent: Vec<Vec<usize>> = vec![Vec::new(); arcs];
    for (k, c) in d.crossings().iter().enumerate() {
        for arc in [c.over, c.under_in, c.under_out] {
            if !adjacent[arc].contains(&k) {
                adjacent[arc].push(k);
            }
        }
    }

    // The under-out color from (under_in, over), per sign.
    let forward = |sign: i8, cin: usize, cover: usize| -> usize {
        if sign > 0 {
            q.op(cin, cover)
        } else {
            inv.op(cin, cover)
        }
    };
    // The under-in color from (under_out, over): the inverse translation.
    let backward = |sign: i8, cout: usize, cover: usize| -> usize {
        if sign > 0 {
            inv.op(cout, cover)
        } else {
            q.op(cout, cover)
        }
    };

    struct State<'s> {
        colors: Vec<Option<usize>>,
        diagram: &'s KnotDiagram,
        adjacent: &'s [Vec<usize>],
    }

    impl<'s> State<'s> {
        /// Assigns and propagates; appends everything set to `trail` and
        /// reports whether the constraints stayed consistent.
        fn assign(
            &mut self,
            arc: usize,
            value: usize,
            trail: &mut Vec<usize>,
            forward: &dyn Fn(i8, usize, usize) -> usize,
            backward: &dyn Fn(i8, usize, usize) -> usize,
        ) -> bool {
            let mut queue = vec![(arc, value)];
            while let Some((arc, value)) = queue.pop() {
                match self.colors[arc] {
                    Some(existing) => {
                        if existing != value {
                            return false;
                        }
                        continue;
                    }
                    None => {
                        self.colors[arc] = Some(value);
                        trail.push(arc);
                    }
                }
                for &k in &self.adjacent[arc] {
                    let c = self.diagram.crossings()[k];
                    let over = self.colors[c.over];
                    let cin = self.colors[c.under_in];
                    let cout = self.colors[c.under_out];
                    match (over, cin, cout) {
                        (Some(o), Some(i), _) => {
                            let need = forward(c.sign, i, o);
                            match cout {
                                Some(existing) => {
                                    if existing != need {
                                        return false;
                                    }
                                }
                                None => queue.push((c.under_out, need)),
                            }
                        }
                        (Some(o), None, Some(u)) => {
                            queue.push((c.under_in, backward(c.sign, u, o)));
                        }
                        _ => {}
                    }
                }
            }
            true
        }

        fn undo(&mut self, trail: &[usize]) {
            for &arc in trail {
                self.colors[arc] = None;
            }
        }

        fn count(
            &mut self,
            n: usize,
            forward: &dyn Fn(i8, usize, usize) -> usize,
            backward: &dyn Fn(i8, usize, usize) -> usize,
        ) -> u128 {
            let Some(arc) = self.colors.iter().position(Option::is_none) else {
                return 1;
            };
            let mut total = 0u128;
            for value in 0..n {
                let mut trail = Vec::new();
                if self.assign(arc, value, &mut trail, forward, backward) {
                    total += self.count(n, forward, backward);
                }
                self.undo(&trail);
            }
            total
        }
    }

    let mut state = State {
        colors: vec![None; arcs],
        diagram: d,
        adjacent: &adjacent,
    };
    let count = state.count(n, &forward, &backward);
    ColoringCount {
        quandle_size: n,
        diagram: d.describe(),
        count,
    }
}

/// Reference counter: tries all `n^arcs` labelings outright.
pub fn count_colorings_exhaustive(d: &KnotDiagram, q: &FiniteQuandle) -> u128 {
    let n = q.size();
    let inv = right_inverse(q);
    let arcs = d.arc_count();
    let mut colors = vec![0usize; arcs];
    let mut count = 0u128;
    loop {
        let ok = d.crossings().iter().all(|c| {
            let expect = if c.sign > 0 {
                q.op(colors[c.under_in], colors[c.over])
            } else {
                inv.op(colors[c.under_in], colors[c.over])
            };
            colors[c.under_out] == expect
        });
        if ok {
            count += 1;
        }
        let mut pos = arcs;
        loop {
            if pos == 0 {
                return count;
            }
            pos -= 1;
            colors[pos] += 1;
            if colors[pos] < n {
                break;
            }
            colors[pos] = 0;
        }
    }
}
