//! Named maneuver plans and controllers.
//!
//! Ids are the tokens that cross between the discrete engines and the
//! continuous side. The registry can be dumped to (and read back from) a
//! directory with one key-value text file per entry.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct Impulse {
    pub time_offset: f64,
    pub delta_v: Vector3<f64>,
}

/// A thrust schedule. The id is assigned by the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct ManeuverPlan {
    pub id: String,
    impulses: Vec<Impulse>,
    horizon: f64,
}

impl ManeuverPlan {
    /// # Panics
    /// If offsets are not strictly increasing within `[0, horizon]`.
    pub fn new(impulses: Vec<Impulse>, horizon: f64) -> Self {
        Self::try_new(impulses, horizon).expect("invalid maneuver plan")
    }

    pub fn try_new(impulses: Vec<Impulse>, horizon: f64) -> Result<Self, String> {
        if !(horizon > 0.0) {
            return Err(format!("horizon {horizon} must be positive"));
        }
        let mut last = -1.0;
        for i in &impulses {
            if !(i.time_offset > last && (0.0..=horizon).contains(&i.time_offset)) {
                return Err("impulse offsets must increase strictly within the horizon".into());
            }
            last = i.time_offset;
        }
        Ok(ManeuverPlan {
            id: String::new(),
            impulses,
            horizon,
        })
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerSpec {
    pub id: String,
    /// Position gain, 1/s².
    pub kp: f64,
    /// Rate gain, 1/s.
    pub kd: f64,
    /// Acceleration limit per signed direction (+x, -x, +y, -y, +z, -z), m/s².
    pub axis_limit: [f64; 6],
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{file}: {message}")]
    Format { file: String, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    plans: BTreeMap<String, ManeuverPlan>,
    controllers: BTreeMap<String, ControllerSpec>,
    next_plan: u64,
    next_controller: u64,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_plan(&mut self, mut plan: ManeuverPlan) -> String {
        self.next_plan += 1;
        let id = format!("plan_{}", self.next_plan);
        plan.id = id.clone();
        self.plans.insert(id.clone(), plan);
        id
    }

    pub fn add_controller(&mut self, kp: f64, kd: f64, axis_limit: [f64; 6]) -> String {
        let id = format!("ctrl_{}", self.next_controller);
        self.next_controller += 1;
        self.controllers.insert(
            id.clone(),
            ControllerSpec {
                id: id.clone(),
                kp,
                kd,
                axis_limit,
            },
        );
        id
    }

    pub fn plan(&self, id: &str) -> Option<&ManeuverPlan> {
        self.plans.get(id)
    }

    pub fn controller(&self, id: &str) -> Option<&ControllerSpec> {
        self.controllers.get(id)
    }

    pub fn plans(&self) -> impl Iterator<Item = &ManeuverPlan> {
        self.plans.values()
    }

    pub fn controllers(&self) -> impl Iterator<Item = &ControllerSpec> {
        self.controllers.values()
    }

    /// Writes `<id>.txt` for every entry.
    pub fn dump_to_dir(&self, dir: &Path) -> Result<(), RegistryError> {
        fs::create_dir_all(dir)?;
        for p in self.plans.values() {
            fs::write(dir.join(format!("{}.txt", p.id)), plan_text(p))?;
        }
        for c in self.controllers.values() {
            fs::write(dir.join(format!("{}.txt", c.id)), controller_text(c))?;
        }
        Ok(())
    }

    /// Reads every `*.txt` entry from a directory written by
    /// [`Registry::dump_to_dir`]. Fresh ids continue after the highest
    /// loaded one.
    pub fn load_from_dir(dir: &Path) -> Result<Self, RegistryError> {
        let mut reg = Registry::new();
        let mut paths: Vec<_> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "txt"))
            .collect();
        paths.sort();
        for path in paths {
            let file = path.display().to_string();
            let text = fs::read_to_string(&path)?;
            let kv = parse_kv(&text).map_err(|message| RegistryError::Format {
                file: file.clone(),
                message,
            })?;
            let fmt_err = |message: String| RegistryError::Format {
                file: file.clone(),
                message,
            };
            match kv.get("kind").map(String::as_str) {
                Some("maneuver") => {
                    let plan = plan_from_kv(&kv).map_err(fmt_err)?;
                    let k = id_number(&plan.id, "plan_").map_err(fmt_err)?;
                    reg.next_plan = reg.next_plan.max(k);
                    reg.plans.insert(plan.id.clone(), plan);
                }
                Some("controller") => {
                    let c = controller_from_kv(&kv).map_err(fmt_err)?;
                    let k = id_number(&c.id, "ctrl_").map_err(fmt_err)?;
                    reg.next_controller = reg.next_controller.max(k + 1);
                    reg.controllers.insert(c.id.clone(), c);
                }
                other => return Err(fmt_err(format!("unknown kind {other:?}"))),
            }
        }
        Ok(reg)
    }
}

fn id_number(id: &str, prefix: &str) -> Result<u64, String> {
    id.strip_prefix(prefix)
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| format!("malformed id {id}"))
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn plan_text(p: &ManeuverPlan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind = maneuver");
    let _ = writeln!(s, "id = {}", p.id);
    let _ = writeln!(s, "horizon = {}", p.horizon);
    let _ = writeln!(s, "impulses = {}", p.impulses.len());
    for (i, imp) in p.impulses.iter().enumerate() {
        let _ = writeln!(s, "impulse.{i}.time = {}", imp.time_offset);
        let _ = writeln!(s, "impulse.{i}.dv = {}", join(imp.delta_v.as_slice()));
    }
    s
}

fn controller_text(c: &ControllerSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kind = controller");
    let _ = writeln!(s, "id = {}", c.id);
    let _ = writeln!(s, "kp = {}", c.kp);
    let _ = writeln!(s, "kd = {}", c.kd);
    let _ = writeln!(s, "axis_limit = {}", join(&c.axis_limit));
    s
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut kv = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once(" = ")
            .ok_or_else(|| format!("line {}: expected `key = value`", no + 1))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(kv)
}

fn get<'a>(kv: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str, String> {
    kv.get(key).map(String::as_str).ok_or_else(|| format!("missing key {key}"))
}

fn num(kv: &BTreeMap<String, String>, key: &str) -> Result<f64, String> {
    get(kv, key)?.parse().map_err(|_| format!("bad number for {key}"))
}

fn nums(kv: &BTreeMap<String, String>, key: &str, len: usize) -> Result<Vec<f64>, String> {
    let xs: Vec<f64> = get(kv, key)?
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| format!("bad number in {key}")))
        .collect::<Result<_, _>>()?;
    if xs.len() != len {
        return Err(format!("{key}: expected {len} values"));
    }
    Ok(xs)
}

fn plan_from_kv(kv: &BTreeMap<String, String>) -> Result<ManeuverPlan, String> {
    let count: usize = get(kv, "impulses")?.parse().map_err(|_| "bad impulse count".to_string())?;
    let impulses = (0..count)
        .map(|i| {
            let dv = nums(kv, &format!("impulse.{i}.dv"), 3)?;
            Ok(Impulse {
                time_offset: num(kv, &format!("impulse.{i}.time"))?,
                delta_v: Vector3::new(dv[0], dv[1], dv[2]),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let horizon = num(kv, "horizon")?;
    let mut plan = ManeuverPlan::try_new(impulses, horizon)?;
    plan.id = get(kv, "id")?.to_string();
    Ok(plan)
}

fn controller_from_kv(kv: &BTreeMap<String, String>) -> Result<ControllerSpec, String> {
    let lim = nums(kv, "axis_limit", 6)?;
    Ok(ControllerSpec {
        id: get(kv, "id")?.to_string(),
        kp: num(kv, "kp")?,
        kd: num(kv, "kd")?,
        axis_limit: [lim[0], lim[1], lim[2], lim[3], lim[4], lim[5]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_sequential() {
        let mut r = Registry::new();
        assert_eq!(r.add_controller(1.0, 2.0, [0.1; 6]), "ctrl_0");
        assert_eq!(r.add_controller(1.0, 2.0, [0.1; 6]), "ctrl_1");
        assert_eq!(r.add_plan(ManeuverPlan::new(vec![], 10.0)), "plan_1");
    }

    #[test]
    fn dump_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Registry::new();
        r.add_controller(4.08e-7, 1.28e-3, [1e-4, 5e-5, 1e-4, 1e-4, 1e-4, 1e-4]);
        r.add_plan(ManeuverPlan::new(
            vec![
                Impulse {
                    time_offset: 0.0,
                    delta_v: Vector3::new(0.0, 0.0, -0.41937),
                },
                Impulse {
                    time_offset: 14400.0,
                    delta_v: Vector3::new(1e-17, 0.0, 0.61),
                },
            ],
            14400.0,
        ));
        r.dump_to_dir(dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("plan_1.txt")).unwrap();
        assert!(text.starts_with("kind = maneuver\nid = plan_1\nhorizon = 14400\n"));
        let mut back = Registry::load_from_dir(dir.path()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.add_controller(1.0, 1.0, [1.0; 6]), "ctrl_1");
    }

    #[test]
    #[should_panic]
    fn unordered_impulses_rejected() {
        let imp = |t| Impulse {
            time_offset: t,
            delta_v: Vector3::zeros(),
        };
        ManeuverPlan::new(vec![imp(5.0), imp(1.0)], 10.0);
    }
}
