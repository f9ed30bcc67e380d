use std::path::PathBuf;

use hybridsat::orchestrator::{replay, run_scenario, ReplayOutcome, ScenarioConfig};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn frozen() -> String {
    std::fs::read_to_string(golden("casestudy.trace.jsonl")).unwrap()
}

#[test]
fn frozen_trace_replays_identically() {
    assert_eq!(replay(&frozen()).unwrap(), ReplayOutcome::Identical { lines: 62 });
}

#[test]
fn shipped_scenario_and_programs_reproduce_frozen_trace() {
    let mut cfg = ScenarioConfig::load(&golden("casestudy.cfg")).unwrap();
    cfg.set_seed(7);
    let lines = run_scenario(&cfg).trace.trace_lines();
    let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    assert!(text == frozen(), "trace differs from the frozen golden file");
}

#[test]
fn frozen_trace_contains_case_study_sequence() {
    let text = frozen();
    let tick1 = text.lines().nth(2).unwrap();
    let order = [
        "comp_distance(",
        ", out)",
        "assert_shared(stateinfo(",
        "assert_shared(proximity_to_centre(out))",
        "+!get_to_centre -> 2",
        "plan_approach_to_centre(plan_1",
        "apply_controls(plan_1)",
    ];
    let mut at = 0;
    for needle in order {
        let found = tick1[at..].find(needle).unwrap_or_else(|| panic!("{needle} missing or out of order"));
        at += found + needle.len();
    }
}

#[test]
fn tampered_trace_diverges_at_edited_tick() {
    let text = frozen();
    let tampered: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let l = if i == 31 { l.replacen("\"clipped\":0", "\"clipped\":1", 1) } else { l.to_string() };
            format!("{l}\n")
        })
        .collect();
    match replay(&tampered).unwrap() {
        ReplayOutcome::Diverged { line, tick, .. } => {
            assert_eq!(line, 32);
            assert_eq!(tick, Some(30));
        }
        other => panic!("{other:?}"),
    }
    let truncated: String = text.lines().take(40).map(|l| format!("{l}\n")).collect();
    assert!(matches!(
        replay(&truncated).unwrap(),
        ReplayOutcome::Diverged { line: 41, tick: Some(39), .. }
    ));
}
