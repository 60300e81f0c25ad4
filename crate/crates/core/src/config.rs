//! `key = value` parameter files and the layering of file and command-line
//! values.
//!
//! ```text
//! # unequal temperatures
//! omega0 = 0.5
//! temp_l = 0.7
//! temp_r = 0.4
//! ```

use std::fs;
use std::path::Path;

use crate::analysis::{apply, Param};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Parameters used when neither a file nor a flag sets them.
pub fn default_params() -> ModelParams {
    ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (0.0, 0.0))
        .expect("valid default parameters")
}

/// Optional value per config key. Within one layer an occupation beats a
/// temperature for the same side.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamOverrides {
    pub omega0: Option<f64>,
    pub gamma_l: Option<f64>,
    pub gamma_r: Option<f64>,
    pub temp_l: Option<f64>,
    pub temp_r: Option<f64>,
    pub occ_l: Option<f64>,
    pub occ_r: Option<f64>,
    pub x_l: Option<f64>,
    pub x_r: Option<f64>,
}

impl ParamOverrides {
    pub fn get(&self, p: Param) -> Option<f64> {
        *self.slot(p)
    }

    pub fn set(&mut self, p: Param, value: f64) {
        *self.slot_mut(p) = Some(value);
    }

    fn slot(&self, p: Param) -> &Option<f64> {
        match p {
            Param::Omega0 => &self.omega0,
            Param::GammaL => &self.gamma_l,
            Param::GammaR => &self.gamma_r,
            Param::TempL => &self.temp_l,
            Param::TempR => &self.temp_r,
            Param::OccL => &self.occ_l,
            Param::OccR => &self.occ_r,
            Param::XL => &self.x_l,
            Param::XR => &self.x_r,
        }
    }

    fn slot_mut(&mut self, p: Param) -> &mut Option<f64> {
        match p {
            Param::Omega0 => &mut self.omega0,
            Param::GammaL => &mut self.gamma_l,
            Param::GammaR => &mut self.gamma_r,
            Param::TempL => &mut self.temp_l,
            Param::TempR => &mut self.temp_r,
            Param::OccL => &mut self.occ_l,
            Param::OccR => &mut self.occ_r,
            Param::XL => &mut self.x_l,
            Param::XR => &mut self.x_r,
        }
    }

    /// `self` layered over `base`. A temperature or occupation given for a
    /// side in `self` replaces both thermal entries of that side in `base`.
    pub fn over(&self, base: &ParamOverrides) -> ParamOverrides {
        let mut out = *base;
        for (temp, occ) in [(Param::TempL, Param::OccL), (Param::TempR, Param::OccR)] {
            if self.get(temp).is_some() || self.get(occ).is_some() {
                *out.slot_mut(temp) = self.get(temp);
                *out.slot_mut(occ) = self.get(occ);
            }
        }
        for p in Param::ALL {
            if let Some(v) = self.get(p) {
                out.set(p, v);
            }
        }
        out
    }

    /// Assignments in application order: temperatures before occupations.
    pub fn assignments(&self) -> Vec<(Param, f64)> {
        use Param::*;
        [Omega0, GammaL, GammaR, XL, XR, TempL, TempR, OccL, OccR]
            .into_iter()
            .filter_map(|p| self.get(p).map(|v| (p, v)))
            .collect()
    }

    /// Applies the overrides to [`default_params`] and validates.
    pub fn resolve(&self) -> Result<ModelParams> {
        self.resolve_on(default_params())
    }

    pub fn resolve_on(&self, base: ModelParams) -> Result<ModelParams> {
        apply(base, &self.assignments())
    }
}

pub fn parse_config(text: &str, path: &Path) -> Result<ParamOverrides> {
    let mut out = ParamOverrides::default();
    for (i, raw) in text.lines().enumerate() {
        let err = |message: String| Error::Config {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let param: Param = key
            .trim()
            .parse()
            .map_err(|_| err(format!("unknown key `{}`", key.trim())))?;
        let value: f64 = value
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| err(format!("`{}` is not a finite number", value.trim())))?;
        out.set(param, value);
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<ParamOverrides> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    parse_config(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Thermal;

    fn parse(text: &str) -> Result<ParamOverrides> {
        parse_config(text, Path::new("test.conf"))
    }

    #[test]
    fn parses_keys_and_comments() {
        let o = parse("# header\nomega0 = 0.5\n\ntemp_l=0.7 # hot\n  x_r = 1e-1\n").unwrap();
        assert_eq!(o.omega0, Some(0.5));
        assert_eq!(o.temp_l, Some(0.7));
        assert_eq!(o.x_r, Some(0.1));
        assert_eq!(o.occ_l, None);
    }

    #[test]
    fn reports_line_numbers() {
        match parse("omega0 = 0.5\nbeta = 2\n") {
            Err(Error::Config { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("beta"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("x_l 0.5"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(matches!(parse("x_l = abc"), Err(Error::Config { .. })));
        assert!(matches!(parse("x_l = inf"), Err(Error::Config { .. })));
    }

    #[test]
    fn defaults() {
        let p = ParamOverrides::default().resolve().unwrap();
        assert_eq!(p, default_params());
        assert_eq!(p.occupations().unwrap(), (1.0, 0.1));
    }

    #[test]
    fn occupation_beats_temperature_in_a_layer() {
        let o = parse("temp_l = 0.7\nocc_l = 2").unwrap();
        let p = o.resolve().unwrap();
        assert_eq!(p.left.thermal, Thermal::Occupation(2.0));
    }

    #[test]
    fn flags_override_file() {
        let file = parse("occ_l = 2\nx_l = 0.3\ngamma_r = 4").unwrap();
        let mut cli = ParamOverrides::default();
        cli.set(Param::TempL, 0.7);
        cli.set(Param::XL, 0.9);
        let merged = cli.over(&file);
        assert_eq!(merged.occ_l, None);
        assert_eq!(merged.temp_l, Some(0.7));
        assert_eq!(merged.x_l, Some(0.9));
        assert_eq!(merged.gamma_r, Some(4.0));
        let p = merged.resolve().unwrap();
        assert_eq!(p.left.thermal, Thermal::Temperature(0.7));
    }

    #[test]
    fn invalid_values_fail_resolution() {
        let o = parse("gamma_l = -1").unwrap();
        assert!(o.resolve().is_err());
    }
}
