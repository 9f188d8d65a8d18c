use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::force::{strength, Force};
use crate::insertion::{insert_directed, Direction};
use crate::mesh::{sq, MeshPattern, Shading, Square};
use crate::occurrence::{classical_occurrences, host_shading_mask, Occurrence};

use super::algorithm::{pending_squares, shift_occurrence};
use super::lemmas::{shadeable_units, shading_lemma_anchors, trivial_occurrence, Unit};
use super::{Method, ProofResult, SaNode, SaNodeKind, Trace, Verdict};

fn bad(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

/// Re-validates a proof step by step using only the occurrence, insertion
/// and strength primitives. A failure result verifies vacuously.
pub fn verify(result: &ProofResult) -> Result<()> {
    if result.verdict == Verdict::Failure {
        return Ok(());
    }
    let trace = result
        .trace
        .as_ref()
        .ok_or_else(|| bad("success without a trace"))?;
    if result.source.pattern() != result.target.pattern() {
        return Err(bad("source and target disagree on the underlying pattern"));
    }
    match trace {
        Trace::Sl { anchor, square } => {
            expect_target(result, &[*square])?;
            if !shading_lemma_anchors(&result.source, *square).contains(anchor) {
                return Err(bad(format!("square {square} is not shadeable from {anchor}")));
            }
            Ok(())
        }
        Trace::Tsa1 {
            square,
            direction,
            witness,
        } => {
            expect_target(result, &[*square])?;
            let m = insert_directed(&result.source, *square, *direction)?;
            check_occurrence_of(&m, &result.source, witness)?;
            if *witness == trivial_occurrence(result.source.size(), square.col) {
                return Err(bad("witness is the trivial occurrence"));
            }
            Ok(())
        }
        Trace::Ssl { picks } => {
            let mut union: Vec<Square> = Vec::new();
            for (i, (g, unit)) in picks.iter().enumerate() {
                if picks[..i].iter().any(|(h, _)| h == g) {
                    return Err(bad(format!("point {g} picked twice")));
                }
                if !shadeable_units(&result.source, *g)?.contains(unit) {
                    return Err(bad(format!("unit {unit} is not shadeable from point {g}")));
                }
                union.extend(unit.squares());
            }
            expect_target(result, &union)
        }
        Trace::Tsa2 { force, steps } => {
            let force = Force::new(force.entries().to_vec(), result.source.size())?;
            let squares: Vec<Square> = steps.iter().map(|s| s.square).collect();
            expect_target(result, &squares)?;
            let mut working = result.source.clone();
            for step in steps {
                let m = insert_directed(&working, step.square, step.direction)?;
                check_occurrence_of(&m, &result.source, &step.witness)?;
                let trivial = trivial_occurrence(result.source.size(), step.square.col);
                let need = strength(m.pattern(), &trivial, &force)?;
                let got = strength(m.pattern(), &step.witness, &force)?;
                if got <= need {
                    return Err(bad(format!(
                        "witness {} is not stronger than the trivial occurrence",
                        step.witness
                    )));
                }
                working = working.with_square(step.square)?;
            }
            Ok(())
        }
        Trace::Sa { force, root, .. } => {
            let force = Force::new(force.entries().to_vec(), result.source.size())?;
            let k = result.source.size();
            let c = Occurrence::new((1..=k).collect()).expect("identity");
            verify_sa_node(result, &force, &result.source, &c, root)
        }
    }
}

fn expect_target(result: &ProofResult, squares: &[Square]) -> Result<()> {
    let rebuilt = result.source.with_squares(squares)?;
    if rebuilt != result.target {
        return Err(bad("certified squares do not rebuild the target"));
    }
    Ok(())
}

/// Checks that `occ` is a mesh occurrence of `p` inside the mesh host `m`.
fn check_occurrence_of(m: &MeshPattern, p: &MeshPattern, occ: &Occurrence) -> Result<()> {
    if !classical_occurrences(m.pattern(), p.pattern()).contains(occ) {
        return Err(bad(format!("{occ} is not a classical occurrence")));
    }
    let mask = host_shading_mask(m, occ)?;
    if !p.shading().is_subset_of(mask) {
        return Err(bad(format!("{occ} does not respect the shading")));
    }
    Ok(())
}

fn verify_sa_node(
    result: &ProofResult,
    force: &Force,
    w: &MeshPattern,
    c: &Occurrence,
    node: &SaNode,
) -> Result<()> {
    let occ = &node.occurrence;
    if !classical_occurrences(w.pattern(), result.source.pattern()).contains(occ) {
        return Err(bad(format!("{occ} is not an occurrence of the underlying word")));
    }
    let t = host_shading_mask(w, occ)?;
    match &node.kind {
        SaNodeKind::BaseStronger => {
            if !result.source.shading().is_subset_of(t) {
                return Err(bad(format!("{occ} does not carry the source shading")));
            }
            let tracked = strength(w.pattern(), c, force)?;
            let found = strength(w.pattern(), occ, force)?;
            if found <= tracked {
                return Err(bad(format!("{occ} is not strictly stronger")));
            }
            Ok(())
        }
        SaNodeKind::BaseTarget => {
            if !result.target.shading().is_subset_of(t) {
                return Err(bad(format!("{occ} does not carry the target shading")));
            }
            Ok(())
        }
        SaNodeKind::Recurse(steps) => {
            let missing = Shading(result.target.shading().0 & !t.0);
            let pending = pending_squares(w, occ, missing)
                .ok_or_else(|| bad("a missing region holds a point"))?;
            let claimed: Vec<Square> = steps.iter().map(|s| s.square).collect();
            if pending != claimed {
                return Err(bad(format!(
                    "certified squares {claimed:?} differ from the pending set {pending:?}"
                )));
            }
            let mut working = w.clone();
            for step in steps {
                let child_w = insert_directed(&working, step.square, step.direction)?;
                let child_c = shift_occurrence(c, step.square.col);
                verify_sa_node(result, force, &child_w, &child_c, &step.child)?;
                working = working.with_square(step.square)?;
            }
            Ok(())
        }
    }
}

/// Serializes a proof as line-oriented text that `parse_trace_text` reads
/// back. Indentation carries the recursion structure.
pub fn trace_text(result: &ProofResult) -> String {
    let mut out = String::new();
    let verdict = match result.verdict {
        Verdict::Success => "success",
        Verdict::Failure => "failure",
    };
    let _ = writeln!(out, "verdict {verdict}");
    let _ = writeln!(out, "method {}", result.method);
    let _ = writeln!(out, "source {}", result.source);
    let _ = writeln!(out, "target {}", result.target);
    let _ = writeln!(out, "coincidence {}", result.coincidence);
    match &result.trace {
        None => {}
        Some(Trace::Sl { anchor, square }) => {
            let _ = writeln!(out, "anchor {anchor}");
            let _ = writeln!(out, "square {},{}", square.col, square.row);
        }
        Some(Trace::Tsa1 {
            square,
            direction,
            witness,
        }) => {
            let _ = writeln!(out, "square {},{}", square.col, square.row);
            let _ = writeln!(out, "dir {direction}");
            let _ = writeln!(out, "witness {}", indices_text(witness));
        }
        Some(Trace::Ssl { picks }) => {
            for (g, unit) in picks {
                match unit {
                    Unit::Single(a) => {
                        let _ = writeln!(out, "pick {g} single {},{}", a.col, a.row);
                    }
                    Unit::Pair(a, b) => {
                        let _ = writeln!(
                            out,
                            "pick {g} pair {},{} {},{}",
                            a.col, a.row, b.col, b.row
                        );
                    }
                }
            }
        }
        Some(Trace::Tsa2 { force, steps }) => {
            let _ = writeln!(out, "force {force}");
            for step in steps {
                let _ = writeln!(
                    out,
                    "step {},{} {} witness {}",
                    step.square.col,
                    step.square.row,
                    step.direction,
                    indices_text(&step.witness)
                );
            }
        }
        Some(Trace::Sa { force, depth, root }) => {
            let _ = writeln!(out, "force {force}");
            let _ = writeln!(out, "depth {depth}");
            write_sa_node(&mut out, root, 0);
        }
    }
    out
}

fn indices_text(occ: &Occurrence) -> String {
    let parts: Vec<String> = occ.indices().iter().map(|i| i.to_string()).collect();
    parts.join(",")
}

fn write_sa_node(out: &mut String, node: &SaNode, indent: usize) {
    let pad = "  ".repeat(indent);
    let kind = match &node.kind {
        SaNodeKind::BaseStronger => "stronger",
        SaNodeKind::BaseTarget => "target",
        SaNodeKind::Recurse(_) => "recurse",
    };
    let _ = writeln!(out, "{pad}occ {} {kind}", indices_text(&node.occurrence));
    if let SaNodeKind::Recurse(steps) = &node.kind {
        for step in steps {
            let _ = writeln!(
                out,
                "{pad}  sq {},{} {}",
                step.square.col, step.square.row, step.direction
            );
            write_sa_node(out, &step.child, indent + 2);
        }
    }
}

/// Parses the output of [`trace_text`].
pub fn parse_trace_text(text: &str) -> Result<ProofResult> {
    let mut fields: Vec<(usize, &str)> = Vec::new();
    for raw in text.lines() {
        if raw.trim().is_empty() {
            continue;
        }
        let indent_spaces = raw.len() - raw.trim_start().len();
        fields.push((indent_spaces / 2, raw.trim()));
    }
    let mut header = std::collections::HashMap::new();
    let mut body_start = fields.len();
    for (i, &(indent, line)) in fields.iter().enumerate() {
        if indent > 0 {
            body_start = body_start.min(i);
            continue;
        }
        let Some((key, value)) = line.split_once(' ') else {
            return Err(Error::Parse(format!("bad trace line {line:?}")));
        };
        match key {
            "verdict" | "method" | "source" | "target" | "coincidence" | "force" | "depth"
            | "anchor" | "square" | "dir" | "witness" => {
                header.insert(key, value);
            }
            _ => body_start = body_start.min(i),
        }
    }
    let get = |key: &str| -> Result<&str> {
        header
            .get(key)
            .copied()
            .ok_or_else(|| Error::Parse(format!("missing trace field {key}")))
    };
    let verdict = match get("verdict")? {
        "success" => Verdict::Success,
        "failure" => Verdict::Failure,
        other => return Err(Error::Parse(format!("bad verdict {other:?}"))),
    };
    let method = match get("method")? {
        "subset" => Method::Subset,
        "sl" => Method::Sl,
        "tsa1" => Method::Tsa1,
        "ssl" => Method::Ssl,
        "tsa2" => Method::Tsa2,
        "sa" => Method::Sa,
        other => return Err(Error::Parse(format!("bad method {other:?}"))),
    };
    let source: MeshPattern = get("source")?.parse()?;
    let target: MeshPattern = get("target")?.parse()?;
    let coincidence = get("coincidence")? == "true";
    let body = &fields[body_start.min(fields.len())..];

    let trace = if verdict == Verdict::Failure {
        None
    } else {
        Some(match method {
            Method::Sl => Trace::Sl {
                anchor: get("anchor")?
                    .parse()
                    .map_err(|_| Error::Parse("bad anchor".into()))?,
                square: parse_square(get("square")?)?,
            },
            Method::Tsa1 => Trace::Tsa1 {
                square: parse_square(get("square")?)?,
                direction: get("dir")?.parse()?,
                witness: parse_indices(get("witness")?)?,
            },
            Method::Ssl => {
                let mut picks = Vec::new();
                for &(_, line) in body.iter().filter(|(_, l)| l.starts_with("pick ")) {
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    let g: usize = parts
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad pick {line:?}")))?;
                    let unit = match parts.get(2) {
                        Some(&"single") => Unit::Single(parse_square(parts[3])?),
                        Some(&"pair") => Unit::Pair(parse_square(parts[3])?, parse_square(parts[4])?),
                        _ => return Err(Error::Parse(format!("bad pick {line:?}"))),
                    };
                    picks.push((g, unit));
                }
                Trace::Ssl { picks }
            }
            Method::Tsa2 => {
                let mut steps = Vec::new();
                for &(_, line) in body.iter().filter(|(_, l)| l.starts_with("step ")) {
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() != 5 || parts[3] != "witness" {
                        return Err(Error::Parse(format!("bad step {line:?}")));
                    }
                    steps.push(super::Tsa2Step {
                        square: parse_square(parts[1])?,
                        direction: parts[2].parse()?,
                        witness: parse_indices(parts[4])?,
                    });
                }
                Trace::Tsa2 {
                    force: get("force")?.parse()?,
                    steps,
                }
            }
            Method::Sa => {
                let (root, rest) = parse_sa_node(body, 0)?;
                if !rest.is_empty() {
                    return Err(Error::Parse("trailing trace lines".into()));
                }
                Trace::Sa {
                    force: get("force")?.parse()?,
                    depth: get("depth")?
                        .parse()
                        .map_err(|_| Error::Parse("bad depth".into()))?,
                    root,
                }
            }
            Method::Subset => return Err(Error::Parse("subset edges carry no trace".into())),
        })
    };
    Ok(ProofResult {
        verdict,
        method,
        source,
        target,
        coincidence,
        trace,
    })
}

fn parse_square(s: &str) -> Result<Square> {
    let (c, r) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("bad square {s:?}")))?;
    Ok(sq(
        c.parse().map_err(|_| Error::Parse(format!("bad square {s:?}")))?,
        r.parse().map_err(|_| Error::Parse(format!("bad square {s:?}")))?,
    ))
}

fn parse_indices(s: &str) -> Result<Occurrence> {
    if s == "()" {
        return Ok(Occurrence::new(vec![]).unwrap());
    }
    let indices: Vec<usize> = s
        .split(',')
        .map(|part| {
            part.parse()
                .map_err(|_| Error::Parse(format!("bad occurrence {s:?}")))
        })
        .collect::<Result<_>>()?;
    Occurrence::new(indices)
}

type Lines<'a> = [(usize, &'a str)];

fn parse_sa_node<'a>(lines: &'a Lines<'a>, indent: usize) -> Result<(Arc<SaNode>, &'a Lines<'a>)> {
    let Some(&(got, line)) = lines.first() else {
        return Err(Error::Parse("missing sa node".into()));
    };
    if got != indent || !line.starts_with("occ ") {
        return Err(Error::Parse(format!("expected occ line, found {line:?}")));
    }
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad occ line {line:?}")));
    }
    let occurrence = parse_indices(parts[1])?;
    let mut rest = &lines[1..];
    let kind = match parts[2] {
        "stronger" => SaNodeKind::BaseStronger,
        "target" => SaNodeKind::BaseTarget,
        "recurse" => {
            let mut steps = Vec::new();
            while let Some(&(got, line)) = rest.first() {
                if got != indent + 1 || !line.starts_with("sq ") {
                    break;
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("bad sq line {line:?}")));
                }
                let square = parse_square(parts[1])?;
                let direction: Direction = parts[2].parse()?;
                let (child, after) = parse_sa_node(&rest[1..], indent + 2)?;
                steps.push(super::SaStep {
                    square,
                    direction,
                    child,
                });
                rest = after;
            }
            SaNodeKind::Recurse(steps)
        }
        other => return Err(Error::Parse(format!("bad node kind {other:?}"))),
    };
    Ok((Arc::new(SaNode { occurrence, kind }), rest))
}

#[cfg(test)]
mod tests {
    use super::super::{lemma_tsa1, lemma_tsa2, shading_algorithm, shading_lemma_square};
    use super::*;
    use crate::force::Force;
    use crate::insertion::Direction;

    fn pattern(word: &str, squares: &[(usize, usize)]) -> MeshPattern {
        MeshPattern::new(
            word.parse().unwrap(),
            squares.iter().map(|&(c, r)| sq(c, r)),
        )
        .unwrap()
    }

    #[test]
    fn verifies_and_round_trips_every_method() {
        let sl = shading_lemma_square(
            &pattern("12", &[(0, 2), (1, 0), (2, 0), (2, 1)]),
            sq(2, 2),
        )
        .unwrap();
        let tsa1 = lemma_tsa1(&pattern("123", &[(0, 1), (1, 2)]), sq(0, 0)).unwrap();
        let tsa2 = lemma_tsa2(
            &pattern("123", &[(0, 1), (0, 2), (0, 3), (1, 1), (1, 3), (2, 2)]),
            &Force::new(vec![(1, Direction::Down)], 3).unwrap(),
            &[sq(0, 0)],
        )
        .unwrap();
        let sa = shading_algorithm(
            &pattern("132", &[(0, 3), (1, 2), (1, 3)]),
            &pattern("132", &[(0, 3), (1, 0), (1, 2), (2, 1)]),
            &Force::new(vec![(1, Direction::Right)], 3).unwrap(),
            2,
        )
        .unwrap();
        for res in [sl, tsa1, tsa2, sa] {
            assert!(res.is_success());
            verify(&res).unwrap();
            let text = trace_text(&res);
            let parsed = parse_trace_text(&text).unwrap();
            assert_eq!(parsed, res);
            verify(&parsed).unwrap();
        }
    }

    #[test]
    fn tampered_trace_fails_verification() {
        let res = lemma_tsa1(&pattern("123", &[(0, 1), (1, 2)]), sq(0, 0)).unwrap();
        let text = trace_text(&res);
        // swap the witness for the trivial occurrence
        let forged = text.replace("witness 1,2,3", "witness 2,3,4");
        let parsed = parse_trace_text(&forged).unwrap();
        assert!(verify(&parsed).is_err());
    }
}
