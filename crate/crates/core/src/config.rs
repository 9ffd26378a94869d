//! Scenario configuration files: parsing, `key=value` overrides, derived
//! defaults and construction of a runnable [`Scenario`].

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{CapacitorBank, DEFAULT_V_MAX};
use crate::engine::{DriftParams, EmptyWake, Scenario};
use crate::error::{Error, Result};
use crate::model::TaskSpec;
use crate::pcp::{hyperperiod, min_node_count, select_duty_cycles};
use crate::policy::{CycleSchedule, PolicyKind, PolicySpec};
use crate::traces::{
    gen_events, gen_rf_trace, gen_solar_trace, load_trace_csv, robot_trajectory, substream, EnergyTrace,
    EventGenParams, RfParams, RobotPath, SolarParams, TaskCatalog, STREAM_EVENTS, STREAM_TRACES,
};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const DEFAULT_TASK: &str = "DNN-based audio classification";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub seed: u64,
    pub slot_duration: f64,
    /// Simulated length in days; ignored when `horizon_slots` is set.
    pub days: f64,
    pub horizon_slots: Option<u64>,
    pub record_energy: bool,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            seed: 0,
            slot_duration: 5.0,
            days: 30.0,
            horizon_slots: None,
            record_energy: false,
        }
    }
}

impl SimSection {
    pub fn horizon(&self) -> u64 {
        self.horizon_slots
            .unwrap_or_else(|| (self.days * SECONDS_PER_DAY / self.slot_duration).round() as u64)
    }

    pub fn slots_per_day(&self) -> u64 {
        ((SECONDS_PER_DAY / self.slot_duration).round() as u64).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NodesSection {
    /// `None` derives the count from the duty-cycle set.
    pub count: Option<usize>,
    /// Sets capacity from `0.5 C V^2`; otherwise `capacity_mj` is used.
    pub capacitance_f: Option<f64>,
    pub capacity_mj: f64,
    pub v_max: f64,
    pub charge_efficiency: f64,
    /// Fraction of stored energy lost per slot.
    pub leakage_rate: f64,
    pub initial_mj: f64,
}

impl Default for NodesSection {
    fn default() -> Self {
        Self {
            count: None,
            capacitance_f: None,
            capacity_mj: 100.0,
            v_max: DEFAULT_V_MAX,
            charge_efficiency: 0.8,
            leakage_rate: 0.0,
            initial_mj: 0.0,
        }
    }
}

impl NodesSection {
    pub fn bank(&self) -> Result<CapacitorBank> {
        let bank = match self.capacitance_f {
            Some(c) => CapacitorBank::from_capacitance(c, self.v_max, self.charge_efficiency, self.leakage_rate)?,
            None => CapacitorBank::new(self.capacity_mj, self.charge_efficiency, self.leakage_rate)?,
        };
        Ok(bank.with_stored(self.initial_mj))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySource {
    /// One fixed harvest rate per node.
    #[default]
    Constant,
    Solar,
    /// A roaming RF transmitter.
    Rf,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergySection {
    pub source: EnergySource,
    /// Constant source: explicit mJ per slot for each node.
    pub rates_mj: Vec<f64>,
    /// Constant source: rates drawn uniformly from this range when
    /// `rates_mj` is empty.
    pub rate_range_mj: [f64; 2],
    /// Constant source: instead of `rate_range_mj`, give node `k` the energy
    /// its PCP cycle needs, scaled by `1 + U[0, matched_jitter]`, plus a
    /// share `slack * U[0, 2] / N` of one fully covered slot, with node ids
    /// shuffled. A slack of 0 is just enough on average.
    pub matched_slack: Option<f64>,
    pub matched_jitter: f64,
    pub solar: SolarParams,
    /// Solar source: per-node mean power drawn from this range.
    pub solar_mean_range_mw: Option<[f64; 2]>,
    pub rf: RfParams,
    pub robot: RobotPath,
    /// File source: a `slot,node_id,mj` trace file.
    pub path: Option<PathBuf>,
}

impl Default for EnergySection {
    fn default() -> Self {
        Self {
            source: EnergySource::Constant,
            rates_mj: Vec::new(),
            rate_range_mj: [1.0, 10.0],
            matched_slack: None,
            matched_jitter: 0.5,
            solar: SolarParams::default(),
            solar_mean_range_mw: None,
            rf: RfParams::default(),
            robot: RobotPath::default(),
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EventsSection {
    pub count: usize,
    pub period_range: [u64; 2],
    pub duration_range: [u32; 2],
    pub deadline_slots: Option<u64>,
}

impl Default for EventsSection {
    fn default() -> Self {
        let p = EventGenParams::default();
        Self {
            count: p.count,
            period_range: p.period_range,
            duration_range: p.duration_range,
            deadline_slots: p.deadline_slots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskSection {
    /// Catalog entry; the fields below override it.
    pub name: String,
    pub runtime_slots: Option<u32>,
    pub energy_per_slot_mj: Option<f64>,
    pub sensing_mj: Option<f64>,
    /// Awake slot without execution; defaults to an eighth of a compute slot.
    pub listen_mj: Option<f64>,
    pub empty_wake: EmptyWake,
    /// Quantization unit; defaults to the smallest catalog per-slot cost.
    pub unit_energy_mj: Option<f64>,
    /// Replacement catalog file.
    pub catalog: Option<PathBuf>,
}

impl Default for TaskSection {
    fn default() -> Self {
        Self {
            name: DEFAULT_TASK.into(),
            runtime_slots: None,
            energy_per_slot_mj: None,
            sensing_mj: None,
            listen_mj: None,
            empty_wake: EmptyWake::Listen,
            unit_energy_mj: None,
            catalog: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sim: SimSection,
    pub nodes: NodesSection,
    pub energy: EnergySection,
    pub events: EventsSection,
    pub task: TaskSection,
    pub policy: PolicySpec,
    pub drift: DriftParams,
    pub output: OutputSection,
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string().trim_end().to_string())
}

/// Set `dotted.key` in a TOML table. The value is read as TOML, or as a bare
/// string when it does not parse.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| Error::Config(format!("empty override key in `{assignment}`")))?;
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Parse a config document, then apply overrides in order.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return toml::from_str(text).map_err(config_err);
        }
        let mut table: toml::Table = text.parse().map_err(config_err)?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(config_err)?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, overrides).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.rebase(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Resolve relative file paths against the config's directory.
    fn rebase(&mut self, dir: &Path) {
        for p in [&mut self.energy.path, &mut self.task.catalog].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }

    /// The hyperperiod, from the policy or the event period range.
    pub fn hyperperiod(&self) -> Result<u64> {
        match self.policy.hyperperiod {
            Some(t) => Ok(t),
            None => hyperperiod(&self.events.period_range),
        }
    }

    pub fn catalog(&self) -> Result<TaskCatalog> {
        match &self.task.catalog {
            None => Ok(TaskCatalog::builtin()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                TaskCatalog::parse(&text)
            }
        }
    }

    pub fn task(&self) -> Result<TaskSpec> {
        let catalog = self.catalog()?;
        let base = catalog
            .get(&self.task.name)
            .ok_or_else(|| Error::Config(format!("unknown task `{}`", self.task.name)))?
            .to_task(self.sim.slot_duration)?;
        TaskSpec::new(
            &base.name,
            self.task.runtime_slots.unwrap_or(base.runtime_slots),
            self.task.energy_per_slot_mj.unwrap_or(base.energy_per_slot),
            self.task.sensing_mj.unwrap_or(base.sensing_energy),
        )
    }

    /// Fill every derived default so the snapshot reproduces the run alone.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut r = self.clone();
        if !(r.sim.slot_duration > 0.0) {
            return Err(Error::Config("sim.slot_duration must be positive".into()));
        }
        r.sim.horizon_slots = Some(self.sim.horizon());
        let task = self.task()?;
        r.task.runtime_slots = Some(task.runtime_slots);
        r.task.energy_per_slot_mj = Some(task.energy_per_slot);
        r.task.sensing_mj = Some(task.sensing_energy);
        r.task.listen_mj = Some(self.task.listen_mj.unwrap_or(task.energy_per_slot / 8.0));
        r.task.unit_energy_mj = Some(match self.task.unit_energy_mj {
            Some(u) => u,
            None => self.catalog()?.default_unit_energy(self.sim.slot_duration)?,
        });
        let t = self.hyperperiod()?;
        r.policy.hyperperiod = Some(t);
        if r.nodes.count.is_none() {
            r.nodes.count = Some(match (&self.energy.source, &self.energy.path) {
                (EnergySource::File, Some(p)) => load_trace_csv(p)?.len(),
                _ => min_node_count(self.policy.min_cycle, t)?,
            });
        }
        Ok(r)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(config_err)
    }

    fn traces(&self, n: usize, horizon: u64) -> Result<Vec<EnergyTrace>> {
        let e = &self.energy;
        let h = horizon as usize;
        let dt = self.sim.slot_duration;
        let seed = |i: usize| substream(self.sim.seed, STREAM_TRACES, i as u64);
        match e.source {
            EnergySource::Constant => {
                if !e.rates_mj.is_empty() {
                    if e.rates_mj.len() != n {
                        return Err(Error::Config(format!(
                            "energy.rates_mj has {} entries for {n} nodes",
                            e.rates_mj.len()
                        )));
                    }
                    return Ok(e.rates_mj.iter().enumerate().map(|(i, &r)| EnergyTrace::constant(i, r, h)).collect());
                }
                if let Some(slack) = e.matched_slack {
                    return self.matched_traces(n, h, slack);
                }
                let [lo, hi] = e.rate_range_mj;
                if !(lo >= 0.0 && lo <= hi) {
                    return Err(Error::Config(format!("energy.rate_range_mj {:?} is not a valid range", e.rate_range_mj)));
                }
                Ok((0..n)
                    .map(|i| {
                        let r = ChaCha8Rng::seed_from_u64(seed(i)).random_range(lo..=hi);
                        EnergyTrace::constant(i, r, h)
                    })
                    .collect())
            }
            EnergySource::Solar => (0..n)
                .map(|i| {
                    let mut p = e.solar.clone();
                    if let Some([lo, hi]) = e.solar_mean_range_mw {
                        if !(lo >= 0.0 && lo <= hi) {
                            return Err(Error::Config(format!("energy.solar_mean_range_mw [{lo}, {hi}] is not a valid range")));
                        }
                        p.mean_mw = ChaCha8Rng::seed_from_u64(seed(i) ^ 0x5eed).random_range(lo..=hi);
                    }
                    gen_solar_trace(i, &p, h, dt, seed(i))
                })
                .collect(),
            EnergySource::Rf => (0..n)
                .map(|i| {
                    let path = robot_trajectory(&e.robot, horizon, seed(i) ^ 0x7a7a)?;
                    gen_rf_trace(i, &e.rf, &path, h, dt, seed(i))
                })
                .collect(),
            EnergySource::File => {
                let path = e.path.as_ref().ok_or_else(|| Error::Config("energy.source = \"file\" needs energy.path".into()))?;
                let traces = load_trace_csv(path)?;
                if traces.len() != n {
                    return Err(Error::Config(format!("{} holds {} nodes, config asks for {n}", path.display(), traces.len())));
                }
                Ok(traces)
            }
        }
    }

    fn matched_traces(&self, n: usize, h: usize, slack: f64) -> Result<Vec<EnergyTrace>> {
        let jitter = self.energy.matched_jitter;
        if !(slack >= 0.0) || !(jitter >= 0.0) {
            return Err(Error::Config("energy.matched_slack and energy.matched_jitter must be non-negative".into()));
        }
        let task = self.task()?;
        let activation = task.activation_energy();
        let listen = self.task.listen_mj.unwrap_or(task.energy_per_slot / 8.0);
        let [pmin, pmax] = self.events.period_range;
        let mean_period = (pmin + pmax) as f64 / 2.0;
        // Energy per slot to keep one node awake at every event start and
        // listening in between.
        let per_slot = listen + (activation - listen).max(0.0) / mean_period;
        let set = select_duty_cycles(self.policy.min_cycle, self.hyperperiod()?)?;
        let schedule = CycleSchedule::new(set, self.policy.wake_rule);
        let eff = self.nodes.charge_efficiency;
        let mut rng = ChaCha8Rng::seed_from_u64(substream(self.sim.seed, STREAM_TRACES, u64::MAX));
        let mut rates: Vec<f64> = (0..n)
            .map(|k| {
                let load = if k < schedule.len() { schedule.wake_rate(k) } else { 0.0 };
                per_slot / eff * (load * (1.0 + rng.random_range(0.0..=jitter)) + slack / n as f64 * rng.random_range(0.0..2.0))
            })
            .collect();
        rates.shuffle(&mut rng);
        Ok(rates.iter().enumerate().map(|(i, &r)| EnergyTrace::constant(i, r, h)).collect())
    }

    /// Build the scenario this config describes.
    pub fn scenario(&self) -> Result<Scenario> {
        let r = self.resolve()?;
        let horizon = r.sim.horizon();
        let n = r.nodes.count.expect("resolved");
        let events = gen_events(
            &EventGenParams {
                count: r.events.count,
                period_range: r.events.period_range,
                duration_range: r.events.duration_range,
                deadline_slots: r.events.deadline_slots,
                seed: substream(r.sim.seed, STREAM_EVENTS, 0),
            },
            horizon,
        )?;
        Ok(Scenario {
            slot_duration: r.sim.slot_duration,
            horizon,
            traces: r.traces(n, horizon)?,
            events,
            task: r.task()?,
            listen_energy: r.task.listen_mj.expect("resolved"),
            empty_wake: r.task.empty_wake,
            bank: r.nodes.bank()?,
            policy: r.policy.clone(),
            drift: r.drift,
            unit_energy: r.task.unit_energy_mj.expect("resolved"),
            seed: r.sim.seed,
            record_energy: r.sim.record_energy,
        })
    }
}

/// The same scenario under another policy, keeping every other input.
pub fn with_policy(s: &Scenario, policy: &PolicySpec) -> Scenario {
    let mut out = s.clone();
    let hyperperiod = policy.hyperperiod.or(s.policy.hyperperiod);
    out.policy = policy.clone();
    out.policy.hyperperiod = hyperperiod;
    out
}

/// Parse a policy label such as `GRDY(1)`, `ACES(N)` or `SRL(0.9)`.
pub fn parse_policy_label(label: &str) -> Result<PolicySpec> {
    let label = label.trim();
    let (name, arg) = match label.split_once('(') {
        Some((n, rest)) => (
            n,
            Some(rest.strip_suffix(')').ok_or_else(|| Error::Config(format!("unbalanced policy label `{label}`")))?),
        ),
        None => (label, None),
    };
    let kind: PolicyKind = name.parse()?;
    let mut spec = PolicySpec::of(kind);
    match (kind, arg.map(str::trim)) {
        (_, None) | (_, Some("N")) => {}
        (PolicyKind::Srl, Some(g)) => {
            spec.learning.gamma = g.parse().map_err(|_| Error::Config(format!("bad discount in `{label}`")))?;
        }
        (_, Some(k)) => {
            let k: usize = k.parse().map_err(|_| Error::Config(format!("bad node limit in `{label}`")))?;
            spec = spec.with_node_limit(k);
        }
    }
    spec.validate()?;
    Ok(spec)
}
