//! Graphviz export of models and announcement sequences.
//!
//! Each model becomes a `cluster_<i>` subgraph. States are labelled with
//! their name, the true atoms and one depth per agent; the designated state
//! is drawn bold and filled. Every unordered related pair becomes one
//! undirected edge per agent, coloured by agent. Under DPAL, an edge between
//! a state of the negative copy (`0.`) and one of the positive copy (`1.`)
//! is dashed.

use std::fmt::Write;

use crate::model::{Model, StateId};
use crate::semantics::SemanticsKind;
use crate::syntax::AgentId;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub fn agent_color(a: AgentId) -> &'static str {
    COLORS[a.0 % COLORS.len()]
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn copy_of(name: &str) -> Option<&str> {
    name.split_once('.').map(|(c, _)| c)
}

fn write_cluster(
    out: &mut String,
    index: usize,
    title: &str,
    m: &Model,
    point: StateId,
    kind: SemanticsKind,
) {
    let id = |s: StateId| format!("m{index}_s{s}");
    writeln!(out, "  subgraph cluster_{index} {{").unwrap();
    writeln!(out, "    label=\"{}\";", escape(title)).unwrap();
    for s in m.states() {
        let atoms: Vec<&str> = m.valuation(s).iter().map(String::as_str).collect();
        let depths: Vec<String> = (0..m.agents())
            .map(|a| m.depth(AgentId(a), s).to_string())
            .collect();
        let label = format!(
            "{}\\n{{{}}}\\nd=({})",
            escape(m.name(s)),
            escape(&atoms.join(",")),
            depths.join(",")
        );
        let style = if s == point {
            ", style=\"bold,filled\", fillcolor=\"#fff3b0\""
        } else {
            ""
        };
        writeln!(out, "    {} [label=\"{label}\"{style}];", id(s)).unwrap();
    }
    for a in 0..m.agents() {
        let agent = AgentId(a);
        let rel = m.relation(agent);
        for s in m.states() {
            for t in rel.successors(s) {
                if t <= s {
                    continue;
                }
                // Pairs listed in one direction only are drawn as arrows.
                let dir = if rel.related(t, s) { "none" } else { "forward" };
                let cross = kind == SemanticsKind::Dpal
                    && copy_of(m.name(s)).is_some()
                    && copy_of(m.name(s)) != copy_of(m.name(t));
                let style = if cross { ", style=dashed" } else { "" };
                writeln!(
                    out,
                    "    {} -- {} [color=\"{}\", label=\"{a}\", dir={dir}{style}];",
                    id(s),
                    id(t),
                    agent_color(agent)
                )
                .unwrap();
            }
            for t in rel.successors(s) {
                if t < s && !rel.related(t, s) {
                    writeln!(
                        out,
                        "    {} -- {} [color=\"{}\", label=\"{a}\", dir=forward];",
                        id(s),
                        id(t),
                        agent_color(agent)
                    )
                    .unwrap();
                }
            }
        }
    }
    writeln!(out, "  }}").unwrap();
}

/// One model with `point` highlighted.
pub fn model_to_dot(m: &Model, point: StateId) -> String {
    sequence_to_dot(&[(m.clone(), point)], &[], SemanticsKind::Dbel)
}

/// A chain of models, as produced by
/// [`update_sequence`](crate::semantics::update_sequence). `labels[i]` is the
/// announcement that produced model `i + 1`.
pub fn sequence_to_dot(
    steps: &[(Model, StateId)],
    labels: &[String],
    kind: SemanticsKind,
) -> String {
    let mut out = String::from("graph updates {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, (m, point)) in steps.iter().enumerate() {
        let title = match i.checked_sub(1).and_then(|j| labels.get(j)) {
            Some(announced) => format!("step {i}: after [{announced}] ({kind})"),
            None if i == 0 => "initial model".to_string(),
            None => format!("step {i} ({kind})"),
        };
        write_cluster(&mut out, i, &title, m, *point, kind);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{single_state, three_world_model};
    use crate::semantics::update_sequence;
    use crate::syntax::parse;

    #[test]
    fn single_model_has_one_cluster() {
        let dot = model_to_dot(&three_world_model(), 1);
        assert_eq!(dot.matches("subgraph cluster_").count(), 1);
        assert!(dot.contains("m0_s1 [label=\"1\\n{p0}\\nd=(1,2,2)\", style=\"bold,filled\""));
        assert_eq!(dot.matches(" -- ").count(), 2);
        assert!(!dot.contains("dashed"));
    }

    #[test]
    fn dpal_cross_links_are_dashed() {
        let m = single_state(&[0]);
        let f = parse("[K[0] true]true").unwrap();
        let steps = update_sequence(&m, 0, &f, SemanticsKind::Dpal).unwrap();
        let dot = sequence_to_dot(&steps, &["K[0] true".into()], SemanticsKind::Dpal);
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        assert_eq!(dot.matches("style=dashed").count(), 1);
        assert!(dot.contains("after [K[0] true]"));
    }

    #[test]
    fn one_way_pairs_are_arrows() {
        let m =
            crate::semantics::update_adpal(&three_world_model(), &parse("K[2] K[2] p0").unwrap())
                .unwrap()
                .model;
        let dot = model_to_dot(&m, 1);
        assert!(dot.contains("m0_s2 -- m0_s1 [color=\"#d62728\", label=\"1\", dir=forward]"));
    }
}
