//! Scenario parameters and their plain-text (TOML) config format.
//!
//! Every key is optional; missing keys take the default profile, which
//! carries the published system parameters (cell geometry, 32 BS antennas,
//! ray-cluster statistics for the UE links and the RIS-BS link). A complete
//! example lives in `configs/default.toml`.
//!
//! ```toml
//! users = 2
//! kappa_d = 1.0
//! kappa_ru = 1.0
//! kappa_br = "los"        # or inf, or a positive number
//! trials = 500
//! seed = 1
//! methods = ["random", "lower_bound", "ao", "upper_bound"]
//!
//! [ris]
//! n_y = 8
//! n_z = 8
//! spacing = 0.2
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::error::{Error, Result};

/// Uniform rectangular array in the y-z plane.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayGeometry {
    pub n_y: usize,
    pub n_z: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

impl ArrayGeometry {
    pub fn new(n_y: usize, n_z: usize, spacing: f64) -> Self {
        Self { n_y, n_z, spacing }
    }

    /// Closest-to-square `n_y × n_z` factorization of `elements` with
    /// `n_y ≥ n_z`.
    pub fn near_square(elements: usize, spacing: f64) -> Self {
        assert!(elements > 0);
        let mut n_z = (elements as f64).sqrt().floor() as usize;
        while elements % n_z != 0 {
            n_z -= 1;
        }
        Self::new(elements / n_z, n_z, spacing)
    }

    pub fn elements(&self) -> usize {
        self.n_y * self.n_z
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.n_y == 0 || self.n_z == 0 {
            return Err(Error::Config(format!("{what}: array dimensions must be positive")));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::Config(format!("{what}: element spacing must be positive")));
        }
        Ok(())
    }
}

/// Ricean-style K-factor. Pure LOS is a distinct mode, not a large number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KFactor {
    Finite(f64),
    PureLos,
}

impl KFactor {
    /// `(η, ζ)`: LOS and scattered amplitude weights.
    pub fn weights(&self) -> (f64, f64) {
        match *self {
            KFactor::PureLos => (1.0, 0.0),
            KFactor::Finite(k) => ((k / (1.0 + k)).sqrt(), (1.0 / (1.0 + k)).sqrt()),
        }
    }

    pub fn is_pure_los(&self) -> bool {
        matches!(self, KFactor::PureLos)
    }
}

impl fmt::Display for KFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KFactor::PureLos => write!(f, "los"),
            KFactor::Finite(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for KFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "los" | "inf" | "infinity" | "pure_los" => Ok(KFactor::PureLos),
            other => {
                let k: f64 = other
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid K-factor '{s}'")))?;
                Ok(KFactor::from_f64(k))
            }
        }
    }
}

impl KFactor {
    fn from_f64(k: f64) -> Self {
        if k == f64::INFINITY {
            KFactor::PureLos
        } else {
            KFactor::Finite(k)
        }
    }
}

impl<'de> Deserialize<'de> for KFactor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(KFactor::from_f64(k)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Cluster/sub-ray statistics of a scattered channel component.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayParams {
    pub clusters: usize,
    pub subrays: usize,
    /// Mean of the Gaussian central azimuth, degrees.
    pub central_az_mean_deg: f64,
    /// Standard deviation of the Gaussian central azimuth, degrees.
    pub central_az_std_deg: f64,
    /// Standard deviation of the Laplacian sub-ray azimuth offset, degrees.
    pub subray_az_std_deg: f64,
    /// Centre of the Laplacian central elevation, degrees (90° is broadside).
    #[serde(default = "default_el_mean")]
    pub central_el_mean_deg: f64,
    /// Standard deviation of the Laplacian central elevation, degrees.
    pub central_el_std_deg: f64,
    /// Standard deviation of the Laplacian sub-ray elevation offset, degrees.
    pub subray_el_std_deg: f64,
}

fn default_el_mean() -> f64 {
    90.0
}

impl RayParams {
    /// Broad spread used for the UE-BS and UE-RIS links.
    pub fn broad() -> Self {
        Self {
            clusters: 20,
            subrays: 20,
            central_az_mean_deg: 0.0,
            central_az_std_deg: 31.64,
            subray_az_std_deg: 24.25,
            central_el_mean_deg: 90.0,
            central_el_std_deg: 6.12,
            subray_el_std_deg: 1.84,
        }
    }

    /// Narrow spread used for the RIS-BS link.
    pub fn narrow() -> Self {
        Self {
            clusters: 3,
            subrays: 16,
            central_az_mean_deg: 0.0,
            central_az_std_deg: 14.4,
            subray_az_std_deg: 6.24,
            central_el_mean_deg: 90.0,
            central_el_std_deg: 1.9,
            subray_el_std_deg: 1.37,
        }
    }

    pub fn rays(&self) -> usize {
        self.clusters * self.subrays
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.clusters == 0 || self.subrays == 0 {
            return Err(Error::Config(format!("{what}: clusters and subrays must be >= 1")));
        }
        let spreads = [
            self.central_az_std_deg,
            self.subray_az_std_deg,
            self.central_el_std_deg,
            self.subray_el_std_deg,
        ];
        if spreads.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::Config(format!("{what}: all angle spreads must be positive")));
        }
        if !self.central_az_mean_deg.is_finite() || !self.central_el_mean_deg.is_finite() {
            return Err(Error::Config(format!("{what}: angle means must be finite")));
        }
        Ok(())
    }
}

/// Large-scale gain law `P · X · d^(-γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGainParams {
    pub reference_power_db: f64,
    pub pathloss_exponent: f64,
    pub shadow_std_db: f64,
}

/// Phase-design and bound methods evaluated per drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Random,
    LowerBound,
    LowerBoundQuantized,
    Ao,
    Numerical,
    UpperBound,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Random,
        Method::LowerBound,
        Method::LowerBoundQuantized,
        Method::Ao,
        Method::Numerical,
        Method::UpperBound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::LowerBound => "lower_bound",
            Method::LowerBoundQuantized => "lower_bound_qb",
            Method::Ao => "ao",
            Method::Numerical => "numerical",
            Method::UpperBound => "upper_bound",
        }
    }

    /// Whether the method produces a realizable phase design.
    pub fn is_achievable(&self) -> bool {
        !matches!(self, Method::UpperBound)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated method list such as `ao,random`.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Everything needed to run a Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub bs: ArrayGeometry,
    pub ris: ArrayGeometry,
    pub users: usize,
    pub kappa_d: KFactor,
    pub kappa_ru: KFactor,
    pub kappa_br: KFactor,
    pub ue_rays: RayParams,
    pub br_rays: RayParams,
    pub reference_power_db: f64,
    pub direct_pathloss_exponent: f64,
    pub ris_pathloss_exponent: f64,
    pub direct_shadow_std_db: f64,
    pub ris_shadow_std_db: f64,
    pub cell_radius: f64,
    pub exclusion_radius: f64,
    pub ris_bs_distance: f64,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub quantizer_bits: u32,
    pub ao_epsilon: f64,
    pub ao_max_sweeps: usize,
    pub baseline_restarts: usize,
    pub baseline_steps: usize,
    /// Write measured wall times to the CSV instead of zeros. Off by default
    /// so that output files are reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            bs: ArrayGeometry::new(8, 4, 0.5),
            ris: ArrayGeometry::new(8, 8, 0.2),
            users: 2,
            kappa_d: KFactor::Finite(1.0),
            kappa_ru: KFactor::Finite(1.0),
            kappa_br: KFactor::PureLos,
            ue_rays: RayParams::broad(),
            br_rays: RayParams::narrow(),
            reference_power_db: 45.0,
            direct_pathloss_exponent: 3.5,
            ris_pathloss_exponent: 2.0,
            direct_shadow_std_db: 0.0,
            ris_shadow_std_db: 0.0,
            cell_radius: 50.0,
            exclusion_radius: 5.0,
            ris_bs_distance: 10.0,
            trials: 500,
            seed: 1,
            methods: Method::ALL.to_vec(),
            quantizer_bits: 2,
            ao_epsilon: 1e-6,
            ao_max_sweeps: 100,
            baseline_restarts: 4,
            baseline_steps: 300,
            record_timing: false,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Default profile with near-square BS and RIS arrays of the given sizes.
    pub fn with_sizes(bs_antennas: usize, ris_elements: usize, users: usize) -> Self {
        let base = Self::default();
        Self {
            bs: ArrayGeometry::near_square(bs_antennas, base.bs.spacing),
            ris: ArrayGeometry::near_square(ris_elements, base.ris.spacing),
            users,
            ..base
        }
    }

    pub fn direct_link(&self) -> LinkGainParams {
        LinkGainParams {
            reference_power_db: self.reference_power_db,
            pathloss_exponent: self.direct_pathloss_exponent,
            shadow_std_db: self.direct_shadow_std_db,
        }
    }

    pub fn ris_link(&self) -> LinkGainParams {
        LinkGainParams {
            reference_power_db: self.reference_power_db,
            pathloss_exponent: self.ris_pathloss_exponent,
            shadow_std_db: self.ris_shadow_std_db,
        }
    }

    /// Checks every parameter range; run before any work is done.
    pub fn validate(&self) -> Result<()> {
        self.bs.validate("bs")?;
        self.ris.validate("ris")?;
        self.ue_rays.validate("ue_rays")?;
        self.br_rays.validate("br_rays")?;
        if self.users == 0 {
            return Err(Error::Config("users must be >= 1".into()));
        }
        for (name, k) in [("kappa_d", self.kappa_d), ("kappa_ru", self.kappa_ru)] {
            if let KFactor::Finite(v) = k {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("{name} must be >= 0")));
                }
            }
        }
        if let KFactor::Finite(v) = self.kappa_br {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(
                    "kappa_br must be > 0 (the RIS-BS link needs a LOS component)".into(),
                ));
            }
        }
        if !self.reference_power_db.is_finite() {
            return Err(Error::Config("reference_power_db must be finite".into()));
        }
        for (name, g) in [
            ("direct_pathloss_exponent", self.direct_pathloss_exponent),
            ("ris_pathloss_exponent", self.ris_pathloss_exponent),
            ("direct_shadow_std_db", self.direct_shadow_std_db),
            ("ris_shadow_std_db", self.ris_shadow_std_db),
        ] {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::Config(format!("{name} must be >= 0")));
            }
        }
        if !(self.exclusion_radius > 0.0 && self.exclusion_radius < self.cell_radius)
            || !self.cell_radius.is_finite()
        {
            return Err(Error::Config(format!(
                "need 0 < exclusion_radius < cell_radius, got {} and {}",
                self.exclusion_radius, self.cell_radius
            )));
        }
        if !(self.ris_bs_distance > 0.0 && self.ris_bs_distance.is_finite()) {
            return Err(Error::Config("ris_bs_distance must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.quantizer_bits == 0 || self.quantizer_bits > 24 {
            return Err(Error::Config("quantizer_bits must be in 1..=24".into()));
        }
        if !(self.ao_epsilon > 0.0) {
            return Err(Error::Config("ao_epsilon must be > 0".into()));
        }
        if self.ao_max_sweeps == 0 {
            return Err(Error::Config("ao_max_sweeps must be >= 1".into()));
        }
        if self.baseline_restarts == 0 {
            return Err(Error::Config("baseline_restarts must be >= 1".into()));
        }
        Ok(())
    }
}
