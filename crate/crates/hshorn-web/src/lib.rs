//! Browser bindings: classify, decide and generate from a static page.

use std::fmt::Write as _;

use wasm_bindgen::prelude::*;

use hshorn::reductions::generators::{generate, GenOptions, Reduction};
use hshorn::reductions::tm::{fixtures, TuringMachine};
use hshorn::semantics::Semantics;
use hshorn::solver::{decide, render_zone_model, Verdict};
use hshorn::syntax::{classify, desugar, parse_formula_with, Formula, ParseOptions};
use hshorn::zones::OrderClass;

/// Generated formulas longer than this are cut in the page.
const PREVIEW_LINES: usize = 60;

fn parse(text: &str) -> Result<Formula, String> {
    parse_formula_with(text, ParseOptions { allow_reserved: true }).map_err(|e| e.to_string())
}

pub fn classify_text(text: &str) -> Result<String, String> {
    let g = desugar(&parse(text)?);
    let info = classify(&g);
    Ok(format!(
        "FRAGMENT {}\nflags: {info}\ninitial: {}\nclauses: {}\n\n{}",
        info.name(),
        g.initial.len(),
        g.clauses.len(),
        g.render_lines()
    ))
}

pub fn decide_text(text: &str, class: &str, reflexive: bool) -> Result<String, String> {
    let cls = OrderClass::parse(class).ok_or_else(|| format!("unknown class `{class}`"))?;
    let g = desugar(&parse(text)?);
    let verdict = decide(&g, cls, Semantics::new(reflexive, false));
    let mut out = format!("{verdict}\n");
    if let Verdict::Sat { frame, model } = &verdict {
        let _ = write!(out, "\n{}", render_zone_model(frame, model));
    }
    Ok(out)
}

pub fn generate_text(reduction: &str, machine: &str, cells: usize, fin: bool) -> Result<String, String> {
    let r: Reduction = reduction.parse().map_err(|e: hshorn::reductions::generators::GenError| e.to_string())?;
    let tm = machine_named(machine)?;
    let f = generate(r, &tm, cells, GenOptions { fin, any_semantics: false }).map_err(|e| e.to_string())?;
    let info = classify(&desugar(&f));
    let body = f.render_lines();
    let total = body.lines().count();
    let mut out = format!(
        "GENERATED {r} fragment={} initial={} clauses={}\n\n",
        info.name(),
        f.initial.len(),
        f.clauses.len()
    );
    for line in body.lines().take(PREVIEW_LINES) {
        out.push_str(line);
        out.push('\n');
    }
    if total > PREVIEW_LINES {
        let _ = writeln!(out, "... {} more lines", total - PREVIEW_LINES);
    }
    Ok(out)
}

/// A fixture machine by name, or a machine in the text format.
fn machine_named(machine: &str) -> Result<TuringMachine, String> {
    match fixtures::all().into_iter().find(|(n, _)| *n == machine) {
        Some((_, tm)) => Ok(tm),
        None => TuringMachine::parse(machine).map_err(|e| e.to_string()),
    }
}

#[wasm_bindgen(js_name = classify)]
pub fn classify_js(text: &str) -> Result<String, JsValue> {
    classify_text(text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = decide)]
pub fn decide_js(text: &str, class: &str, reflexive: bool) -> Result<String, JsValue> {
    decide_text(text, class, reflexive).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = generate)]
pub fn generate_js(reduction: &str, machine: &str, cells: usize, fin: bool) -> Result<String, JsValue> {
    generate_text(reduction, machine, cells, fin).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_reports_fragment() {
        let out = classify_text("p ; [U](p -> [D]p)").unwrap();
        assert!(out.starts_with("FRAGMENT box-core\n"), "{out}");
        assert!(classify_text("[U](p | q -> r)").is_err());
    }

    #[test]
    fn decide_modes() {
        let sat = decide_text("teaches ; [U](teaches -> [D]teaches)", "den", false).unwrap();
        assert!(sat.starts_with("SAT "), "{sat}");
        let unsat = decide_text("p ; [U](p -> false)", "lin", true).unwrap();
        assert_eq!(unsat, "UNSAT\n");
        let unsupported = decide_text("p", "dis", false).unwrap();
        assert!(unsupported.starts_with("UNSUPPORTED"), "{unsupported}");
        assert!(decide_text("p", "real", true).is_err());
    }

    #[test]
    fn generate_previews() {
        let out = generate_text("pspace-core", "bouncer", 3, false).unwrap();
        assert!(out.starts_with("GENERATED pspace-core fragment=core "), "{out}");
        assert!(out.ends_with("more lines\n"));
        assert!(generate_text("box-horn", "nope", 3, false).is_err());
    }
}
