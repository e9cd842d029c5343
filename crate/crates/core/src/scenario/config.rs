//! Line-oriented `key = value` scenario files.
//!
//! Keys carry a dotted section prefix (`qkd.mu`, `sweep.zenith`); `#` starts a
//! comment; omitted keys keep their defaults. Lists are comma separated and
//! the zenith axis is written `start:stop:step` in degrees.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{Scenario, ZenithAxis};
use crate::budget::Scheme;
use crate::error::{Error, Result};

/// Every key a scenario file may set, in dump order.
pub const KEYS: &[&str] = &[
    "atmosphere.pseudo_wind",
    "atmosphere.ground_wind",
    "atmosphere.hv_jet",
    "atmosphere.hv_free",
    "atmosphere.hv_ground",
    "atmosphere.troposphere_top",
    "orbit.earth_radius",
    "orbit.earth_gm",
    "optics.wavelength",
    "optics.beacon_wavelength",
    "optics.loop_bandwidth",
    "optics.aperture",
    "optics.obscuration",
    "optics.focal_length",
    "optics.tx_aperture",
    "optics.field_stop",
    "channel.eta_rec",
    "channel.eta_spec",
    "channel.eta_det",
    "channel.field_stop_peak",
    "qkd.mu",
    "qkd.nu",
    "qkd.source_rate",
    "qkd.sky_radiance",
    "qkd.dark_rate",
    "qkd.misalignment",
    "qkd.noise_error",
    "qkd.filter_bandwidth",
    "qkd.window",
    "qkd.ec_efficiency",
    "qkd.basis_match",
    "qkd.scatter_radiance",
    "qkd.scatter_bandwidth",
    "qkd.crosstalk_multiplier",
    "sweep.zenith",
    "sweep.separations",
    "sweep.altitudes",
    "sweep.schemes",
    "output.tables",
];

fn scalar<'a>(s: &'a mut Scenario, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "atmosphere.pseudo_wind" => &mut s.atmosphere.pseudo_wind,
        "atmosphere.ground_wind" => &mut s.atmosphere.ground_wind,
        "atmosphere.hv_jet" => &mut s.atmosphere.hv_jet,
        "atmosphere.hv_free" => &mut s.atmosphere.hv_free,
        "atmosphere.hv_ground" => &mut s.atmosphere.hv_ground,
        "atmosphere.troposphere_top" => &mut s.atmosphere.troposphere_top,
        "orbit.earth_radius" => &mut s.earth_radius,
        "orbit.earth_gm" => &mut s.earth_gm,
        "optics.wavelength" => &mut s.optics.wavelength,
        "optics.loop_bandwidth" => &mut s.optics.loop_bandwidth,
        "optics.aperture" => &mut s.optics.aperture,
        "optics.obscuration" => &mut s.optics.obscuration,
        "optics.focal_length" => &mut s.optics.focal_length,
        "optics.tx_aperture" => &mut s.optics.tx_aperture,
        "channel.eta_rec" => &mut s.channel.receiver,
        "channel.eta_spec" => &mut s.channel.spectral,
        "channel.eta_det" => &mut s.channel.detector,
        "channel.field_stop_peak" => &mut s.channel.field_stop_peak,
        "qkd.mu" => &mut s.qkd.mu,
        "qkd.nu" => &mut s.qkd.nu,
        "qkd.source_rate" => &mut s.qkd.source_rate,
        "qkd.sky_radiance" => &mut s.qkd.sky_radiance,
        "qkd.dark_rate" => &mut s.qkd.dark_rate,
        "qkd.misalignment" => &mut s.qkd.misalignment,
        "qkd.noise_error" => &mut s.qkd.noise_error,
        "qkd.filter_bandwidth" => &mut s.qkd.filter_bandwidth,
        "qkd.window" => &mut s.qkd.window,
        "qkd.ec_efficiency" => &mut s.qkd.ec_efficiency,
        "qkd.basis_match" => &mut s.qkd.basis_match,
        "qkd.scatter_radiance" => &mut s.qkd.scatter_radiance,
        "qkd.scatter_bandwidth" => &mut s.qkd.scatter_bandwidth,
        "qkd.crosstalk_multiplier" => &mut s.qkd.crosstalk_multiplier,
        _ => return None,
    })
}

fn optional<'a>(s: &'a mut Scenario, key: &str) -> Option<&'a mut Option<f64>> {
    match key {
        "optics.beacon_wavelength" => Some(&mut s.optics.beacon_wavelength),
        "optics.field_stop" => Some(&mut s.optics.field_stop),
        _ => None,
    }
}

fn number(text: &str) -> std::result::Result<f64, String> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a number", text.trim()))?;
    if !v.is_finite() {
        return Err(format!("'{}' is not finite", text.trim()));
    }
    Ok(v)
}

fn number_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out: Vec<f64> = text
        .split(',')
        .map(number)
        .collect::<std::result::Result<_, _>>()?;
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn zenith_axis(text: &str) -> std::result::Result<ZenithAxis, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [one] => {
            let v = number(one)?;
            Ok(ZenithAxis {
                start: v,
                stop: v,
                step: 1.0,
            })
        }
        [a, b, c] => Ok(ZenithAxis {
            start: number(a)?,
            stop: number(b)?,
            step: number(c)?,
        }),
        _ => Err("expected start:stop:step in degrees".to_string()),
    }
}

fn apply(s: &mut Scenario, key: &str, value: &str) -> std::result::Result<(), String> {
    if let Some(slot) = scalar(s, key) {
        *slot = number(value)?;
        return Ok(());
    }
    if let Some(slot) = optional(s, key) {
        *slot = match value {
            "auto" | "none" => None,
            v => Some(number(v)?),
        };
        return Ok(());
    }
    match key {
        "sweep.zenith" => s.sweep.zenith = zenith_axis(value)?,
        "sweep.separations" => s.sweep.separations = number_list(value)?,
        "sweep.altitudes" => s.sweep.altitudes = number_list(value)?,
        "sweep.schemes" => {
            let mut schemes = Vec::new();
            for name in value.split(',') {
                let scheme: Scheme = name.trim().parse().map_err(|e: Error| e.to_string())?;
                if !schemes.contains(&scheme) {
                    schemes.push(scheme);
                }
            }
            s.sweep.schemes = schemes;
        }
        "output.tables" => {
            s.outputs = value
                .split(',')
                .map(|t| t.trim().to_string())
                .filter(|t| !t.is_empty())
                .collect();
        }
        _ => return Err("unknown key".to_string()),
    }
    Ok(())
}

/// Shortest text that parses back to exactly `x`.
fn exact(x: f64) -> String {
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

fn render(s: &Scenario, key: &str) -> String {
    let mut copy = s.clone();
    if let Some(v) = scalar(&mut copy, key) {
        return exact(*v);
    }
    if let Some(v) = optional(&mut copy, key) {
        return v.map_or_else(|| "auto".to_string(), exact);
    }
    let join = |v: &[f64]| v.iter().map(|&x| exact(x)).collect::<Vec<_>>().join(", ");
    match key {
        "sweep.zenith" => {
            let z = s.sweep.zenith;
            format!("{}:{}:{}", exact(z.start), exact(z.stop), exact(z.step))
        }
        "sweep.separations" => join(&s.sweep.separations),
        "sweep.altitudes" => join(&s.sweep.altitudes),
        "sweep.schemes" => s
            .sweep
            .schemes
            .iter()
            .map(|x| x.name())
            .collect::<Vec<_>>()
            .join(", "),
        "output.tables" => s.outputs.join(", "),
        _ => unreachable!("every key in KEYS renders"),
    }
}

/// Effective configuration, one `key = value` line per key.
pub fn dump_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let mut section = "";
    for key in KEYS {
        let prefix = key.split('.').next().unwrap_or("");
        if prefix != section {
            if !section.is_empty() {
                out.push('\n');
            }
            section = prefix;
        }
        let _ = writeln!(out, "{key} = {}", render(s, key));
    }
    out
}

/// Parse scenario text; `origin` names the source in diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let mut s = Scenario::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let err = |line: usize, key: &str, message: String| Error::Config {
        path: origin.to_string(),
        line,
        key: key.to_string(),
        message,
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(line_no, line, "expected `key = value`".into()));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(line_no, key, "missing value".into()));
        }
        if !KEYS.contains(&key) {
            return Err(err(line_no, key, "unknown key".into()));
        }
        if let Some(first) = seen.get(key) {
            return Err(err(
                line_no,
                key,
                format!("duplicate key (first set on line {first})"),
            ));
        }
        apply(&mut s, key, value).map_err(|m| err(line_no, key, m))?;
        seen.insert(key.to_string(), line_no);
    }

    let locate = |key: &str| seen.get(key).copied().unwrap_or(0);
    if !(s.qkd.nu < s.qkd.mu) {
        let key = if seen.contains_key("qkd.nu") {
            "qkd.nu"
        } else {
            "qkd.mu"
        };
        return Err(err(
            locate(key),
            key,
            format!(
                "decoy intensity requires ν < μ (ν = {}, μ = {})",
                s.qkd.nu, s.qkd.mu
            ),
        ));
    }
    if let Err(e) = s.validate() {
        let key = match &e {
            Error::Domain { quantity, .. } => KEYS
                .iter()
                .find(|k| k.ends_with(&format!(".{quantity}")))
                .copied()
                .unwrap_or("scenario"),
            Error::Invalid(m) if m.contains("zenith") => "sweep.zenith",
            Error::Invalid(m) if m.contains("separation") => "sweep.separations",
            Error::Invalid(m) if m.contains("altitude") => "sweep.altitudes",
            Error::Invalid(m) if m.contains("earth") => "orbit.earth_radius",
            Error::Invalid(m) if m.contains("preset") => "output.tables",
            _ => "scenario",
        };
        return Err(err(locate(key), key, e.to_string()));
    }
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, "test.cfg")
    }

    #[test]
    fn empty_file_gives_defaults() {
        let s = parse("").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.qkd.mu, 0.7);
        assert_eq!(s.optics.aperture, 1.03);
        assert_eq!(s.optics.loop_bandwidth, 500.0);
        assert_eq!(s.sweep.zenith.points().len(), 76);
    }

    #[test]
    fn comments_and_whitespace() {
        let s = parse(
            "# header\n\n  qkd.mu = 0.6   # signal\nsweep.schemes = tdm, SpatialPioneer,tdm\n",
        )
        .unwrap();
        assert_eq!(s.qkd.mu, 0.6);
        assert_eq!(
            s.sweep.schemes,
            vec![Scheme::PureTdm, Scheme::SpatialPioneer]
        );
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let e = parse("qkd.mu = 0.6\n\nqkd.muu = 0.5\n").unwrap_err();
        match e {
            Error::Config { line, key, .. } => {
                assert_eq!(line, 3);
                assert_eq!(key, "qkd.muu");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decoy_ordering_enforced() {
        let e = parse("qkd.mu = 0.05\nqkd.nu = 0.1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("requires ν < μ"), "{msg}");
        assert!(msg.starts_with("test.cfg:2: qkd.nu"), "{msg}");
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse("qkd.mu 0.6").unwrap_err(),
            Error::Config { line: 1, .. }
        ));
        assert!(parse("qkd.mu =").is_err());
        assert!(parse("qkd.mu = abc").is_err());
        assert!(parse("qkd.mu = 0.6\nqkd.mu = 0.5")
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(parse("sweep.zenith = 0:80:1").is_err());
        assert!(parse("sweep.zenith = 0:75:0").is_err());
        assert!(parse("sweep.zenith = 0:75").is_err());
        assert!(parse("sweep.schemes = laser").is_err());
        assert!(parse("output.tables = fig99").is_err());
    }

    #[test]
    fn domain_errors_point_at_key() {
        let e = parse("\noptics.obscuration = 1.5\n").unwrap_err();
        match e {
            Error::Config { line, key, .. } => {
                assert_eq!((line, key.as_str()), (2, "optics.obscuration"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_axes() {
        let s = parse(
            "sweep.zenith = 0:30:5\nsweep.separations = 5, 1, 1\nsweep.altitudes = 8e5, 400000\n",
        )
        .unwrap();
        assert_eq!(
            s.sweep.zenith.points(),
            vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
        );
        assert_eq!(s.sweep.separations, vec![1.0, 5.0]);
        assert_eq!(s.sweep.altitudes, vec![4e5, 8e5]);
        let single = parse("sweep.zenith = 30").unwrap();
        assert_eq!(single.sweep.zenith.points(), vec![30.0]);
        let odd = parse("sweep.zenith = 0:75:0.1").unwrap();
        assert_eq!(odd.sweep.zenith.points().len(), 751);
    }

    #[test]
    fn optional_values() {
        let s = parse("optics.beacon_wavelength = 850e-9\noptics.field_stop = auto").unwrap();
        assert_eq!(s.optics.beacon_wavelength, Some(850e-9));
        assert_eq!(s.optics.field_stop, None);
    }

    #[test]
    fn dump_round_trips() {
        let mut s = Scenario::default();
        s.qkd.mu = 0.55;
        s.optics.field_stop = Some(1e-5);
        s.sweep.schemes = vec![Scheme::WdmPioneer];
        s.outputs = vec!["fig7".into(), "full".into()];
        let text = dump_scenario(&s);
        for key in KEYS {
            assert!(text.contains(&format!("{key} = ")), "{key}");
        }
        assert_eq!(parse(&text).unwrap(), s);
    }
}
