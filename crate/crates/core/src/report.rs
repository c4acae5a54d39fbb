//! Verdict reports in the checker's text dialect or as JSON.

use std::fmt::Write as _;

use serde::Serialize;

use crate::checker::{Lasso, Verdict};
use crate::ltl::Primitive;
use crate::semantics::{TransitionSystem, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

/// One checked property with full-state counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub formula: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primitive: Option<Primitive>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Lasso<Valuation>>,
}

#[derive(Serialize)]
struct Document<'a> {
    properties: &'a [ReportEntry],
}

impl ReportEntry {
    pub fn from_verdict(sys: &TransitionSystem, v: &Verdict, primitive: Option<Primitive>) -> ReportEntry {
        ReportEntry {
            formula: v.property.to_string(),
            primitive,
            holds: v.holds,
            counterexample: v.counterexample.as_ref().map(|l| l.map(|s| sys.valuation(s))),
        }
    }

    pub fn from_valuations(v: &Verdict<Valuation>, primitive: Option<Primitive>) -> ReportEntry {
        ReportEntry {
            formula: v.property.to_string(),
            primitive,
            holds: v.holds,
            counterexample: v.counterexample.clone(),
        }
    }
}

fn write_state(out: &mut String, trace: usize, step: usize, state: &Valuation, previous: Option<&Valuation>) {
    let _ = writeln!(out, "-> State: {trace}.{step} <-");
    for (name, value) in state {
        if previous.and_then(|p| p.get(name)) != Some(value) {
            let _ = writeln!(out, "  {name} = {value}");
        }
    }
}

/// Text: one `-- specification <f> is true|false` line per property; each
/// failure is followed by its trace, printing only changed variables after
/// the first state, with `-- Loop starts here` before the cycle and the
/// cycle's first state repeated at the end. JSON: `{"properties": [..]}`
/// with full states.
pub fn render_report(entries: &[ReportEntry], format: ReportFormat) -> String {
    if format == ReportFormat::Json {
        let mut s = serde_json::to_string_pretty(&Document { properties: entries })
            .expect("report serializes");
        s.push('\n');
        return s;
    }
    let mut out = String::new();
    let mut trace = 0;
    for e in entries {
        let verdict = if e.holds { "true" } else { "false" };
        let _ = writeln!(out, "-- specification {} is {verdict}", e.formula);
        let Some(lasso) = &e.counterexample else {
            continue;
        };
        trace += 1;
        out.push_str("-- as demonstrated by the following execution sequence\n");
        out.push_str("Trace Description: LTL Counterexample\n");
        out.push_str("Trace Type: Counterexample\n");
        let (states, l) = lasso.positions();
        let mut previous: Option<&Valuation> = None;
        for (i, state) in states.iter().enumerate() {
            if i == l {
                out.push_str("-- Loop starts here\n");
            }
            write_state(&mut out, trace, i + 1, state, previous);
            previous = Some(state);
        }
        write_state(&mut out, trace, states.len() + 1, states[l], previous);
    }
    out
}
