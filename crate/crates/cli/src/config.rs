//! Key-value run configurations.
//!
//! A config is a plain text file of `key = value` lines; `#` starts a
//! comment. Every run resolves its config against the defaults below and
//! embeds the resolved pairs in its reports, so a report alone is enough
//! to reproduce the run.
//!
//! ```text
//! family = double_phase        # orlicz_power | variable_exponent |
//!                              # double_phase | example_1_1 | step
//! p = 2                        # family exponents where applicable
//! q = 4
//! domain = ball                # ball | box
//! dim = 1
//! radius = 1                   # ball
//! center = 0                   # ball, comma-separated coordinates
//! lo = -1                      # box corners, comma-separated
//! hi = 1
//! exclude =                    # points, `;`-separated, coords `,`-separated
//! sigma = 1
//! conditions = a0, a2-shifted  # a0 | a1 | a2-shifted | a2-interval |
//!                              # a2-direct | a2-max | ainc | adec
//!                              # entry suffix `:given` or `:search`
//! witness = search             # default witness mode: given | search
//! beta = 0.5                   # given-mode witness
//! h = const:1                  # zero | const:<c> | decay:<c>
//! beta_floor = 0.001           # counterexample search floor
//! h_cap = 10                   # counterexample search sup cap
//! expect = holds, violated     # holds | vacuous | violated, per condition
//! plan.x_per_axis = 8
//! plan.grid_points = 400
//! plan.depth = 12
//! eps = 0.2, 0.1, 0.05, 0.025  # density experiment
//! function = bump:0.5          # bump:<radius> | csv:<path>
//! resolution = 2048            # quadrature cells per axis
//! threshold_factor = 0.1       # density exit gate: final < factor * |f|
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use orlicz_core::plan::PlanParams;
use orlicz_core::{gallery, ConditionId, HFunction, PhiFamily, Point, SpatialDomain, Verdict, Witness};

/// A usage error: malformed config or arguments. Exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMode {
    Given,
    Search,
}

#[derive(Clone, Debug)]
pub struct ConditionRequest {
    pub condition: ConditionId,
    pub mode: WitnessMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    Vacuous,
    Violated,
}

impl Expectation {
    pub fn matches(&self, v: Verdict) -> bool {
        matches!(
            (self, v),
            (Expectation::Holds, Verdict::HoldsOnSamples { .. })
                | (Expectation::Vacuous, Verdict::HoldsOnSamples { vacuous: true })
                | (Expectation::Violated, Verdict::Violated)
        )
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Holds => write!(f, "holds"),
            Expectation::Vacuous => write!(f, "vacuous"),
            Expectation::Violated => write!(f, "violated"),
        }
    }
}

/// A parsed and resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub family_name: String,
    pub p: f64,
    pub q: f64,
    pub sigma: f64,
    pub conditions: Vec<ConditionRequest>,
    pub beta: f64,
    pub h_spec: String,
    pub beta_floor: f64,
    pub h_cap: f64,
    pub expect: Option<Vec<Expectation>>,
    pub plan_params: PlanParams,
    pub eps: Vec<f64>,
    pub function_spec: String,
    pub resolution: usize,
    pub threshold_factor: f64,
    domain_spec: DomainSpec,
    resolved: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
struct DomainSpec {
    kind: String,
    dim: usize,
    radius: f64,
    center: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    exclude: Vec<Vec<f64>>,
}

fn parse_list(v: &str) -> Result<Vec<f64>, UsageError> {
    v.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| usage(format!("bad number '{s}': {e}"))))
        .collect()
}

fn condition_from_token(token: &str) -> Result<ConditionId, UsageError> {
    Ok(match token {
        "a0" => ConditionId::A0,
        "a1" => ConditionId::A1,
        "a2-shifted" => ConditionId::A2Shifted,
        "a2-interval" => ConditionId::A2Interval,
        "a2-direct" => ConditionId::A2Direct,
        "a2-max" => ConditionId::A2Max,
        "ainc" => ConditionId::AIncP,
        "adec" => ConditionId::ADecQ,
        other => return Err(usage(format!("unknown condition '{other}'"))),
    })
}

pub fn condition_token(c: ConditionId) -> &'static str {
    match c {
        ConditionId::A0 => "a0",
        ConditionId::A1 => "a1",
        ConditionId::A2Shifted => "a2-shifted",
        ConditionId::A2Interval => "a2-interval",
        ConditionId::A2Direct => "a2-direct",
        ConditionId::A2Max => "a2-max",
        ConditionId::AIncP => "ainc",
        ConditionId::ADecQ => "adec",
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, UsageError> {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected 'key = value', got '{line}'", lineno + 1)))?;
            raw.insert(key.trim().to_string(), value.trim().to_string());
        }
        RunConfig::from_raw(raw)
    }

    fn from_raw(raw: BTreeMap<String, String>) -> Result<RunConfig, UsageError> {
        let known = [
            "family", "p", "q", "domain", "dim", "radius", "center", "lo", "hi", "exclude",
            "sigma", "conditions", "witness", "beta", "h", "beta_floor", "h_cap", "expect",
            "plan.x_per_axis", "plan.grid_points", "plan.depth", "eps", "function", "resolution",
            "threshold_factor",
        ];
        for key in raw.keys() {
            if !known.contains(&key.as_str()) {
                return Err(usage(format!("unknown config key '{key}'")));
            }
        }
        let get = |key: &str, default: &str| -> String {
            raw.get(key).cloned().unwrap_or_else(|| default.to_string())
        };
        let get_f64 = |key: &str, default: f64| -> Result<f64, UsageError> {
            match raw.get(key) {
                None => Ok(default),
                Some(v) => v.parse().map_err(|e| usage(format!("field '{key}': {e}"))),
            }
        };
        let get_usize = |key: &str, default: usize| -> Result<usize, UsageError> {
            match raw.get(key) {
                None => Ok(default),
                Some(v) => v.parse().map_err(|e| usage(format!("field '{key}': {e}"))),
            }
        };

        let family_name = get("family", "orlicz_power");
        if !gallery::catalog().iter().any(|(n, _)| *n == family_name) {
            return Err(usage(format!("unknown family '{family_name}'")));
        }
        let p = get_f64("p", 2.0)?;
        let q = get_f64("q", 4.0)?;
        if !(p > 0.0 && q > 0.0) {
            return Err(usage(format!("exponents must be positive: p={p}, q={q}")));
        }
        let dim = get_usize("dim", 1)?;
        if dim == 0 || dim > 3 {
            return Err(usage(format!("dim must be 1..=3, got {dim}")));
        }

        let domain_kind = get("domain", "ball");
        let radius = get_f64("radius", 1.0)?;
        let center = parse_list(&get("center", &vec!["0"; dim].join(",")))?;
        let lo = parse_list(&get("lo", &vec!["-1"; dim].join(",")))?;
        let hi = parse_list(&get("hi", &vec!["1"; dim].join(",")))?;
        let exclude: Vec<Vec<f64>> = match raw.get("exclude") {
            None => Vec::new(),
            Some(v) if v.trim().is_empty() => Vec::new(),
            Some(v) => v
                .split(';')
                .map(parse_list)
                .collect::<Result<Vec<_>, _>>()?,
        };

        let witness_default = match get("witness", "search").as_str() {
            "given" => WitnessMode::Given,
            "search" => WitnessMode::Search,
            other => return Err(usage(format!("witness must be given|search, got '{other}'"))),
        };
        let mut conditions = Vec::new();
        for entry in get("conditions", "a0").split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (token, mode) = match entry.split_once(':') {
                Some((t, "given")) => (t, WitnessMode::Given),
                Some((t, "search")) => (t, WitnessMode::Search),
                Some((_, m)) => return Err(usage(format!("bad witness mode '{m}' in '{entry}'"))),
                None => (entry, witness_default),
            };
            conditions.push(ConditionRequest { condition: condition_from_token(token)?, mode });
        }
        if conditions.is_empty() {
            return Err(usage("no conditions requested"));
        }

        let expect = match raw.get("expect") {
            None => None,
            Some(v) => {
                let parsed: Result<Vec<Expectation>, UsageError> = v
                    .split(',')
                    .map(|t| match t.trim() {
                        "holds" => Ok(Expectation::Holds),
                        "vacuous" => Ok(Expectation::Vacuous),
                        "violated" => Ok(Expectation::Violated),
                        other => Err(usage(format!("bad expectation '{other}'"))),
                    })
                    .collect();
                Some(parsed?)
            }
        };

        let sigma = get_f64("sigma", 1.0)?;
        if sigma <= 0.0 {
            return Err(usage(format!("sigma must be positive, got {sigma}")));
        }
        let beta = get_f64("beta", 0.5)?;
        let h_spec = get("h", "const:1");
        let beta_floor = get_f64("beta_floor", 1e-3)?;
        let h_cap = get_f64("h_cap", 10.0)?;
        let eps = parse_list(&get("eps", "0.2, 0.1, 0.05, 0.025"))?;
        let function_spec = get("function", "bump:0.5");
        let resolution = get_usize("resolution", 2048)?;
        let threshold_factor = get_f64("threshold_factor", 0.1)?;

        let plan_params = PlanParams {
            x_per_axis: get_usize("plan.x_per_axis", 8)?,
            grid_points: get_usize("plan.grid_points", 400)?,
            refinement_depth: get_usize("plan.depth", 12)? as u32,
            ..PlanParams::default()
        };

        let domain_spec =
            DomainSpec { kind: domain_kind, dim, radius, center, lo, hi, exclude };

        let mut config = RunConfig {
            family_name,
            p,
            q,
            sigma,
            conditions,
            beta,
            h_spec,
            beta_floor,
            h_cap,
            expect,
            plan_params,
            eps,
            function_spec,
            resolution,
            threshold_factor,
            domain_spec,
            resolved: BTreeMap::new(),
        };
        config.domain()?; // validate eagerly so errors carry the field name
        config.resolved = config.resolve();
        Ok(config)
    }

    pub fn with_plan_depth(mut self, depth: u32) -> RunConfig {
        self.plan_params.refinement_depth = depth;
        self.resolved = self.resolve();
        self
    }

    pub fn with_expect(mut self, expect: Vec<Expectation>) -> RunConfig {
        self.expect = Some(expect);
        self.resolved = self.resolve();
        self
    }

    pub fn domain(&self) -> Result<SpatialDomain, UsageError> {
        let s = &self.domain_spec;
        let mut domain = match s.kind.as_str() {
            "ball" => {
                if s.center.len() != s.dim {
                    return Err(usage("center dimension does not match dim"));
                }
                SpatialDomain::new_ball(Point::new(s.center.clone()), s.radius)
                    .map_err(|e| usage(e.to_string()))?
            }
            "box" => {
                if s.lo.len() != s.dim || s.hi.len() != s.dim {
                    return Err(usage("box corner dimension does not match dim"));
                }
                SpatialDomain::new_box(s.lo.clone(), s.hi.clone())
                    .map_err(|e| usage(e.to_string()))?
            }
            other => return Err(usage(format!("domain must be ball|box, got '{other}'"))),
        };
        for coords in &s.exclude {
            domain = domain
                .exclude(Point::new(coords.clone()))
                .map_err(|e| usage(e.to_string()))?;
        }
        // the punctured example family carries its own domain; the config
        // domain must agree on the dimension
        Ok(domain)
    }

    pub fn family(&self) -> Result<PhiFamily, UsageError> {
        let domain = self.domain()?;
        gallery::by_name(&self.family_name, self.p, self.q, domain).map_err(usage)
    }

    pub fn witness(&self, domain: &SpatialDomain) -> Result<Witness, UsageError> {
        let h = match self.h_spec.split_once(':') {
            None if self.h_spec == "zero" => HFunction::zero(),
            Some(("const", level)) => {
                let level: f64 =
                    level.parse().map_err(|e| usage(format!("h const level: {e}")))?;
                HFunction::const_indicator(level, domain).map_err(|e| usage(e.to_string()))?
            }
            Some(("decay", level)) => {
                let level: f64 =
                    level.parse().map_err(|e| usage(format!("h decay level: {e}")))?;
                HFunction::decay(level, domain.dimension()).map_err(|e| usage(e.to_string()))?
            }
            _ => return Err(usage(format!("h must be zero|const:<c>|decay:<c>, got '{}'", self.h_spec))),
        };
        Witness::new(self.beta, h, self.sigma).map_err(|e| usage(e.to_string()))
    }

    fn resolve(&self) -> BTreeMap<String, String> {
        let s = &self.domain_spec;
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        m.insert("family".into(), self.family_name.clone());
        m.insert("p".into(), self.p.to_string());
        m.insert("q".into(), self.q.to_string());
        m.insert("domain".into(), s.kind.clone());
        m.insert("dim".into(), s.dim.to_string());
        match s.kind.as_str() {
            "ball" => {
                m.insert("radius".into(), s.radius.to_string());
                m.insert("center".into(), join(&s.center));
            }
            _ => {
                m.insert("lo".into(), join(&s.lo));
                m.insert("hi".into(), join(&s.hi));
            }
        }
        m.insert(
            "exclude".into(),
            s.exclude.iter().map(|p| join(p)).collect::<Vec<_>>().join(";"),
        );
        m.insert("sigma".into(), self.sigma.to_string());
        m.insert(
            "conditions".into(),
            self.conditions
                .iter()
                .map(|c| {
                    format!(
                        "{}:{}",
                        condition_token(c.condition),
                        match c.mode {
                            WitnessMode::Given => "given",
                            WitnessMode::Search => "search",
                        }
                    )
                })
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("beta".into(), self.beta.to_string());
        m.insert("h".into(), self.h_spec.clone());
        m.insert("beta_floor".into(), self.beta_floor.to_string());
        m.insert("h_cap".into(), self.h_cap.to_string());
        if let Some(e) = &self.expect {
            m.insert(
                "expect".into(),
                e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            );
        }
        m.insert("plan.x_per_axis".into(), self.plan_params.x_per_axis.to_string());
        m.insert("plan.grid_points".into(), self.plan_params.grid_points.to_string());
        m.insert("plan.depth".into(), self.plan_params.refinement_depth.to_string());
        m.insert("eps".into(), join(&self.eps));
        m.insert("function".into(), self.function_spec.clone());
        m.insert("resolution".into(), self.resolution.to_string());
        m.insert("threshold_factor".into(), self.threshold_factor.to_string());
        m
    }

    /// The resolved key-value pairs, sorted, for embedding in reports.
    pub fn resolved_pairs(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let c = RunConfig::parse("family = orlicz_power\nconditions = a0\n").unwrap();
        assert_eq!(c.family_name, "orlicz_power");
        assert_eq!(c.conditions.len(), 1);
        assert_eq!(c.sigma, 1.0);
        assert!(c.family().is_ok());
    }

    #[test]
    fn parse_per_condition_modes_and_expect() {
        let c = RunConfig::parse(
            "family = example_1_1\nconditions = a2-interval:given, a2-direct:search\n\
             h = const:1\nbeta = 0.5\nexpect = holds, violated\n",
        )
        .unwrap();
        assert_eq!(c.conditions[0].mode, WitnessMode::Given);
        assert_eq!(c.conditions[1].mode, WitnessMode::Search);
        let e = c.expect.as_ref().unwrap();
        assert_eq!(e[0], Expectation::Holds);
        assert_eq!(e[1], Expectation::Violated);
    }

    #[test]
    fn unknown_keys_and_values_are_usage_errors() {
        assert!(RunConfig::parse("familly = step\n").is_err());
        assert!(RunConfig::parse("family = nope\n").is_err());
        assert!(RunConfig::parse("family = step\nconditions = a9\n").is_err());
        assert!(RunConfig::parse("family = step\nconditions = a0\nsigma = -1\n").is_err());
    }

    #[test]
    fn domain_round_trip() {
        let c = RunConfig::parse(
            "family = orlicz_power\nconditions = a0\ndomain = box\ndim = 2\nlo = 0,0\nhi = 2,3\n",
        )
        .unwrap();
        let d = c.domain().unwrap();
        assert_eq!(d.dimension(), 2);
        assert_eq!(d.measure(), 6.0);
    }

    #[test]
    fn resolved_pairs_are_stable_and_complete() {
        let c = RunConfig::parse("family = double_phase\nconditions = a0, a1\n").unwrap();
        let pairs = c.resolved_pairs();
        assert_eq!(pairs.get("family").unwrap(), "double_phase");
        assert_eq!(pairs.get("conditions").unwrap(), "a0:search,a1:search");
        assert!(pairs.contains_key("plan.depth"));
    }
}
