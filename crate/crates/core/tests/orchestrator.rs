use std::path::PathBuf;

use hybridsat::orchestrator::{run_scenario, RunError, ScenarioConfig, TraceLog};

fn scenario(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name);
    ScenarioConfig::load(&path).unwrap()
}

fn short(name: &str, duration: f64) -> ScenarioConfig {
    let mut cfg = scenario(name);
    cfg.sim.duration = duration;
    cfg
}

fn run_ok(cfg: &ScenarioConfig) -> TraceLog {
    let out = run_scenario(cfg);
    assert_eq!(out.error, None);
    out.trace
}

fn events(recs: &[hybridsat::agent::CycleRecord]) -> Vec<String> {
    recs.iter().map(|r| r.event.clone()).collect()
}

const GEO_ABS: &str = include_str!("../examples/geo_abs.gw");

fn inline(abstraction: &str, reasoning: &str) -> ScenarioConfig {
    let text = r#"
[sim]
duration = 30
initial = [0, 0, 10000, 0, 0, 0]

[agent]
abstraction_program = "a.gw"
reasoning_program = "r.gw"
abstraction_beliefs = ["proximity_to_centre(in)"]
reasoning_beliefs = ["proximity_to_centre(in)"]

[store]
initial_beliefs = ["proximity_to_centre(in)"]
"#;
    ScenarioConfig::from_texts(text, abstraction, reasoning).unwrap()
}

#[test]
fn case_study_first_tick_sequence() {
    let trace = run_ok(&short("casestudy.cfg", 20.0));

    // initialization: the seeded in-belief reaches both engines
    assert_eq!(events(&trace.init.abstraction), ["+proximity_to_centre(in)"]);
    assert_eq!(trace.init.abstraction[0].selected_plan, None);
    assert_eq!(trace.init.reasoning[0].selected_plan, Some(1));
    assert_eq!(trace.init.reasoning[0].actions, ["maintain_path"]);

    let t1 = &trace.ticks[0];
    let stateinfo = t1.abstraction[0].event.trim_start_matches('+').to_string();
    assert!(stateinfo.starts_with("stateinfo("));
    let args = &stateinfo["stateinfo(".len()..stateinfo.len() - 1];

    assert_eq!(
        events(&t1.abstraction),
        [
            format!("+{stateinfo}"),
            "+thrusterstatus(1, 1, 1, 1, 1, 1)".into(),
            "+proximity_to_centre(out)".into(),
            "-proximity_to_centre(in)".into(),
        ]
    );
    assert_eq!(t1.abstraction[0].actions, [format!("comp_distance({args}, out)")]);
    assert_eq!(t1.abstraction[0].belief_delta, ["+proximity_to_centre(out)"]);
    assert_eq!(
        t1.abstraction[2].actions,
        [
            "remove_shared(stateinfo(A1, A2, A3, A4, A5, A6))".to_string(),
            format!("assert_shared({stateinfo})"),
            "remove_shared(proximity_to_centre(in))".into(),
            "assert_shared(proximity_to_centre(out))".into(),
        ]
    );

    assert_eq!(
        events(&t1.reasoning),
        [
            format!("+{stateinfo}"),
            "-proximity_to_centre(in)".into(),
            "+proximity_to_centre(out)".into(),
        ]
    );
    let r = &t1.reasoning[2];
    assert_eq!(r.selected_plan, Some(0));
    assert_eq!(r.goals, ["+!get_to_centre -> 2", "+!try_execute(plan_1) -> 3"]);
    assert_eq!(
        r.actions,
        [
            format!("plan_approach_to_centre(plan_1, locn({args}))"),
            "apply_controls(plan_1)".into(),
        ]
    );
    assert_eq!(t1.store, ["proximity_to_centre(out)".to_string(), stateinfo]);

    // the maneuver starts on the next tick
    assert_eq!(trace.ticks[1].applied, ["apply_controls(plan_1)"]);
    assert!(trace.ticks[1].sim.as_ref().unwrap().contains("maneuver(plan_1)"));
}

#[test]
fn actions_take_effect_next_tick() {
    let trace = run_ok(&short("casestudy.cfg", 3000.0));
    let mode = |k: usize| trace.ticks[k].sim.as_ref().unwrap().split(',').nth(7).unwrap().to_string();
    for k in 0..trace.ticks.len() - 1 {
        let issued: Vec<String> = trace.ticks[k]
            .reasoning
            .iter()
            .flat_map(|r| r.actions.iter())
            .filter(|a| a.starts_with("apply_controls") || *a == "maintain_path")
            .cloned()
            .collect();
        assert_eq!(trace.ticks[k + 1].applied, issued, "tick {}", k + 1);
    }
    assert_eq!(mode(0), "station_keeping(ctrl_0)");
    assert_eq!(mode(1), "maneuver(plan_1)");
}

#[test]
fn case_study_liveness_and_recovery() {
    let trace = run_ok(&scenario("casestudy.cfg"));
    let first_out = trace
        .ticks
        .iter()
        .position(|t| t.abstraction.iter().any(|r| r.actions.iter().any(|a| a.ends_with(", out)"))))
        .unwrap();
    let apply = trace
        .ticks
        .iter()
        .position(|t| t.actions().any(|a| a.starts_with("apply_controls")))
        .unwrap();
    assert!(apply <= first_out + 1);
    assert_eq!(trace.ticks.len(), 1440);
    let row = trace.ticks.last().unwrap().sim.clone().unwrap();
    let f: Vec<f64> = row.split(',').take(4).map(|x| x.parse().unwrap()).collect();
    assert!((f[1] * f[1] + f[2] * f[2] + f[3] * f[3]).sqrt() <= 50.0);
}

#[test]
fn inside_bounds_only_station_keeps() {
    let trace = run_ok(&short("inside.cfg", 3600.0));
    let all_actions: Vec<&str> = std::iter::once(&trace.init)
        .chain(&trace.ticks)
        .flat_map(|t| t.actions())
        .collect();
    assert!(all_actions.iter().all(|a| !a.starts_with("assert_shared") && !a.starts_with("remove_shared")));
    assert_eq!(all_actions.iter().filter(|a| **a == "maintain_path").count(), 1);
    assert!(trace
        .ticks
        .iter()
        .all(|t| t.sim.as_ref().unwrap().contains("station_keeping(ctrl_0)")));
    assert!(trace.ticks.iter().all(|t| t.store == ["proximity_to_centre(in)"]));
}

#[test]
fn zero_duration_has_empty_trace() {
    let trace = run_ok(&scenario("empty.cfg"));
    assert!(trace.ticks.is_empty());
    assert_eq!(trace.sim_csv().lines().count(), 1);
}

#[test]
fn fault_triggers_one_controller_synthesis() {
    let mut cfg = short("fault.cfg", 90000.0);
    cfg.sim.faults[0].time = 3600.0;
    let trace = run_ok(&cfg);
    let synth: Vec<(u64, &str)> = trace
        .ticks
        .iter()
        .flat_map(|t| t.actions().map(move |a| (t.tick, a)))
        .filter(|(_, a)| a.starts_with("synthesize_controller"))
        .collect();
    assert_eq!(synth.len(), 1);
    assert_eq!(synth[0].1, "synthesize_controller(ctrl_1, 0, 0.5)");
    let c0 = trace.registry.controller("ctrl_0").unwrap();
    let c1 = trace.registry.controller("ctrl_1").unwrap();
    assert_eq!(c1.axis_limit[0], c0.axis_limit[0] / 2.0);
    assert_eq!(c1.axis_limit[1..], c0.axis_limit[1..]);
    let after = trace.ticks[synth[0].0 as usize].sim.clone().unwrap();
    assert!(after.contains("station_keeping(ctrl_1)"), "{after}");
}

#[test]
fn deterministic_outputs() {
    let cfg = short("casestudy.cfg", 600.0);
    let a = run_ok(&cfg);
    let b = run_ok(&cfg);
    assert_eq!(a.trace_lines(), b.trace_lines());
    assert_eq!(a.sim_csv(), b.sim_csv());
    assert_eq!(a.agents_jsonl(), b.agents_jsonl());
    let mut other = cfg.clone();
    other.set_seed(8);
    assert_ne!(run_ok(&other).sim_csv(), a.sim_csv());
}

#[test]
fn writes_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let trace = run_ok(&short("casestudy.cfg", 100.0));
    trace.write_to_dir(dir.path()).unwrap();
    for f in ["trace.jsonl", "sim.csv", "agents.jsonl", "store.jsonl", "registry/ctrl_0.txt", "registry/plan_1.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("sim.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("t,rx,ry,rz,vx,vy,vz,mode,h0,h1,h2,h3,h4,h5,ax_cmd,ay_cmd,az_cmd\n"));
}

#[test]
fn budget_exhaustion_stops_the_run() {
    let reasoning = "+proximity_to_centre(in) : {True} <- maintain_path;\n+b : {True} <- -b, +b;\n";
    let mut cfg = inline(GEO_ABS, reasoning);
    cfg.reasoning_beliefs.push(hybridsat::lang::parse_term("b").unwrap());
    let out = run_scenario(&cfg);
    let err = out.error.unwrap();
    assert!(matches!(err, RunError::BudgetExhausted(_)), "{err}");
    assert_eq!(err.exit_code(), 4);
    assert!(out.trace.trace_lines().last().unwrap().contains("\"error\""));
}

#[test]
fn unknown_plan_is_fatal() {
    let reasoning = "+proximity_to_centre(in) : {True} <- apply_controls(plan_42);\n";
    let out = run_scenario(&inline(GEO_ABS, reasoning));
    assert_eq!(out.error, Some(RunError::UnknownPlan("plan_42".into())));
    assert_eq!(out.error.unwrap().exit_code(), 5);
}

#[test]
fn uncontrollable_axis_is_fatal() {
    let reasoning = "+proximity_to_centre(in) : {True} <- \
        synthesize_controller(C, 0, 0), synthesize_controller(D, 1, 0);\n";
    let out = run_scenario(&inline(GEO_ABS, reasoning));
    let err = out.error.unwrap();
    assert!(matches!(err, RunError::UncontrollableAxis(_)), "{err}");
    assert_eq!(err.exit_code(), 6);
}

#[test]
fn program_errors_are_config_errors() {
    let out = run_scenario(&inline(GEO_ABS, "+a : {True} <- launch_rocket;\n"));
    let err = out.error.unwrap();
    assert!(err.to_string().contains("launch_rocket/0"), "{err}");
    assert_eq!(err.exit_code(), 3);
    let out = run_scenario(&inline(GEO_ABS, "+a : True <- b;\n"));
    assert_eq!(out.error.unwrap().exit_code(), 3);
}

#[test]
fn scenario_validation() {
    let base = "[sim]\nduration = 30\ninitial = [0, 0, 0, 0, 0, 0]\n[agent]\nabstraction_program = \"a\"\nreasoning_program = \"r\"\n";
    assert!(ScenarioConfig::from_texts(base, "", "").is_ok());
    for bad in [
        format!("{base}colour = 3\n"),
        base.replace("duration = 30", "duration = 35"),
        base.replace("duration = 30", "duration = 30\nwobble = 1"),
        format!("{base}cycle_budget = 0\n"),
        format!("{base}abstraction_beliefs = [\"p(X)\"]\n"),
    ] {
        let err = ScenarioConfig::from_texts(&bad, "", "").unwrap_err();
        assert_eq!(err.exit_code(), 3, "{bad}");
    }
}
