//! Physical constants and the particle table.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planck constant, J·s (exact since the 2019 SI redefinition).
pub const PLANCK_SI: f64 = 6.62607015e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
/// Joules per electronvolt (exact).
pub const ELECTRONVOLT_SI: f64 = 1.602176634e-19;

/// Unit system used by every calculation. Defaults are SI; overriding all
/// three with 1 gives natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Planck constant, J·s.
    pub h: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Joules per eV.
    pub electronvolt: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            h: PLANCK_SI,
            c: SPEED_OF_LIGHT_SI,
            electronvolt: ELECTRONVOLT_SI,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsOverride {
    h: Option<f64>,
    c: Option<f64>,
    electronvolt: Option<f64>,
}

impl Constants {
    pub fn new(h: f64, c: f64, electronvolt: f64) -> Result<Self> {
        let k = Constants { h, c, electronvolt };
        k.validate()?;
        Ok(k)
    }

    /// `h = c = electronvolt = 1`.
    pub fn natural() -> Self {
        Constants {
            h: 1.0,
            c: 1.0,
            electronvolt: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("h", self.h),
            ("c", self.c),
            ("electronvolt", self.electronvolt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!(
                    "constant `{name}` must be finite and strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Energy in eV to joules.
    pub fn joules(&self, ev: f64) -> f64 {
        ev * self.electronvolt
    }
}

/// Reads a `key = value` override file (comments start with `#`). Absent
/// source gives the SI defaults; keys that are not given keep their default.
pub fn constants_from_config<R: Read>(source: Option<R>) -> Result<Constants> {
    let mut k = Constants::default();
    let Some(mut source) = source else {
        return Ok(k);
    };
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Validation(format!("cannot read constants: {e}")))?;
    let ov: ConstantsOverride = toml::from_str(&text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::Parse {
            line,
            message: e.message().to_string(),
        }
    })?;
    if let Some(h) = ov.h {
        k.h = h;
    }
    if let Some(c) = ov.c {
        k.c = c;
    }
    if let Some(ev) = ov.electronvolt {
        k.electronvolt = ev;
    }
    k.validate()?;
    Ok(k)
}

/// Spin in units of ħ, kept as an exact fraction (`1/2`, `1`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spin(pub Rational64);

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Spin {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let r: Rational64 = s
            .trim()
            .parse()
            .map_err(|_| format!("invalid spin `{s}`"))?;
        if r < Rational64::from_integer(0) {
            return Err(format!("negative spin `{s}`"));
        }
        Ok(Spin(r))
    }
}

/// A named particle. Only the rest-mass energy feeds the physics; charge
/// and spin ride along as metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSpec {
    pub name: String,
    /// Mc², eV. Zero for massless particles.
    pub rest_mass_energy: f64,
    /// Units of the elementary charge.
    pub charge: f64,
    pub spin: Spin,
}

impl ParticleSpec {
    pub fn new(name: &str, rest_mass_energy: f64) -> Result<Self> {
        if !(rest_mass_energy.is_finite() && rest_mass_energy >= 0.0) {
            return Err(Error::Validation(format!(
                "rest mass energy of `{name}` must be finite and >= 0, got {rest_mass_energy}"
            )));
        }
        Ok(ParticleSpec {
            name: name.to_string(),
            rest_mass_energy,
            charge: 0.0,
            spin: Spin(Rational64::from_integer(0)),
        })
    }

    pub fn is_massless(&self) -> bool {
        self.rest_mass_energy == 0.0
    }
}

const HEADER: [&str; 4] = ["name", "mass_ev", "charge", "spin"];

/// Table compiled into the binary, used when no `--particles` file is given.
pub const DEFAULT_PARTICLES_CSV: &str = "\
name,mass_ev,charge,spin
# rest-mass energies, eV
electron,510998.95,-1,1/2
muon,105658375.5,-1,1/2
tau,1776860000,-1,1/2
proton,938272088.16,1,1/2
neutron,939565420.52,0,1/2
photon,0,0,1
";

/// Parses a particle CSV (`name,mass_ev,charge,spin`, `#` comments allowed).
pub fn load_particle_table<R: Read>(source: R) -> Result<Vec<ParticleSpec>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);

    let header = reader.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let got: Vec<&str> = header.iter().collect();
    if got != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, got `{}`",
                HEADER.join(","),
                got.join(",")
            ),
        });
    }

    let mut out: Vec<ParticleSpec> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |message: String| Error::Parse { line, message };
        if record.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", record.len())));
        }
        let name = &record[0];
        if name.is_empty() {
            return Err(bad("empty particle name".into()));
        }
        let mass: f64 = record[1]
            .parse()
            .map_err(|_| bad(format!("invalid mass `{}`", &record[1])))?;
        let charge: f64 = record[2]
            .parse()
            .map_err(|_| bad(format!("invalid charge `{}`", &record[2])))?;
        if !charge.is_finite() {
            return Err(bad(format!("invalid charge `{}`", &record[2])));
        }
        let spin: Spin = record[3].parse().map_err(bad)?;
        let mut p = ParticleSpec::new(name, mass).map_err(|e| bad(e.to_string()))?;
        p.charge = charge;
        p.spin = spin;
        if out.iter().any(|q| q.name == p.name) {
            return Err(Error::Conflict(format!(
                "duplicate particle `{}` on line {line}",
                p.name
            )));
        }
        out.push(p);
    }
    Ok(out)
}

/// Writes a table in the same CSV format `load_particle_table` reads.
pub fn write_particle_table(table: &[ParticleSpec]) -> String {
    let mut s = HEADER.join(",");
    s.push('\n');
    for p in table {
        s.push_str(&format!(
            "{},{},{},{}\n",
            p.name, p.rest_mass_energy, p.charge, p.spin
        ));
    }
    s
}

pub fn default_particle_table() -> Vec<ParticleSpec> {
    load_particle_table(DEFAULT_PARTICLES_CSV.as_bytes()).expect("built-in particle table is valid")
}

pub fn find_particle<'a>(table: &'a [ParticleSpec], name: &str) -> Result<&'a ParticleSpec> {
    table
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::Usage(format!("unknown particle `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_electron_and_photon() {
        let t = load_particle_table(
            "name,mass_ev,charge,spin\nelectron,510998.95,-1,1/2\nphoton,0,0,1\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].name, "electron");
        assert_eq!(t[0].rest_mass_energy, 510998.95);
        assert_eq!(t[0].charge, -1.0);
        assert_eq!(t[0].spin.to_string(), "1/2");
        assert!(t[1].is_massless());
    }

    #[test]
    fn header_only_is_empty() {
        assert!(load_particle_table("name,mass_ev,charge,spin\n".as_bytes())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn comments_are_skipped() {
        let t = load_particle_table(
            "name,mass_ev,charge,spin\n# note\nmuon,105658375.5,-1,1/2\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn malformed_row_names_line() {
        let err = load_particle_table(
            "name,mass_ev,charge,spin\nelectron,510998.95,-1,1/2\nmuon,heavy,-1,1/2\n".as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn negative_mass_rejected() {
        let err =
            load_particle_table("name,mass_ev,charge,spin\nx,-1,0,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn duplicate_is_conflict() {
        let err = load_particle_table("name,mass_ev,charge,spin\ne,1,0,0\ne,2,0,0\n".as_bytes())
            .unwrap_err();
        assert!(matches!(err, Error::Conflict(_)));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(load_particle_table("name,mass\ne,1\n".as_bytes()).is_err());
    }

    #[test]
    fn default_constants_are_si() {
        let k = constants_from_config::<&[u8]>(None).unwrap();
        assert_eq!(k.h, 6.62607015e-34);
        assert_eq!(k.c, 299792458.0);
    }

    #[test]
    fn natural_units_override() {
        let k = constants_from_config(Some("h = 1\nc = 1 # natural\n".as_bytes())).unwrap();
        assert_eq!((k.h, k.c), (1.0, 1.0));
        assert_eq!(k.electronvolt, ELECTRONVOLT_SI);
    }

    #[test]
    fn negative_c_rejected() {
        let err = constants_from_config(Some("c = -1".as_bytes())).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(constants_from_config(Some("hbar = 1".as_bytes())).is_err());
    }

    #[test]
    fn default_table_loads() {
        let t = default_particle_table();
        assert!(find_particle(&t, "electron").is_ok());
        assert!(find_particle(&t, "photon").unwrap().is_massless());
        assert!(find_particle(&t, "graviton").is_err());
    }
}
