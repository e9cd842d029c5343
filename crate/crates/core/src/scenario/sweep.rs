use std::fmt;

use rayon::prelude::*;

use super::table::{Table, Value};
use super::Scenario;
use crate::budget::{PathTerms, Scheme};
use crate::channel::eta_total;
use crate::error::{Error, Result};
use crate::geometry::PassGeometry;
use crate::qkd::{background_yield, evaluate};

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    /// The decoy bounds admitted no single-photon contribution; the rate is zero.
    Collapsed,
    Failed(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Collapsed => f.write_str("collapsed"),
            Status::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

/// Per line-of-sight terms shared by every scheme and separation.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteTerms {
    /// Zenith angle as configured, degrees.
    pub zenith_deg: f64,
    pub path: PathTerms,
    /// Daytime sky photons per detection window.
    pub sky_photons: f64,
    /// Beacon photons per window reaching the signal detector when beacon and
    /// signal share a wavelength and a path.
    pub crosstalk_photons: f64,
}

impl SiteTerms {
    pub fn compute(scenario: &Scenario, altitude: f64, zenith_deg: f64) -> Result<Self> {
        let geom = PassGeometry::with_constants(
            altitude,
            zenith_deg.to_radians(),
            scenario.earth_radius,
            scenario.earth_gm,
        )?;
        let wdm = scenario.sweep.schemes.iter().any(|s| s.is_wdm());
        let cfg = scenario.optics.system(Scheme::WdmPioneer, 0.0);
        let beacon = wdm.then_some(cfg.beacon_wavelength);
        let path = PathTerms::compute(&cfg, &geom, &scenario.atmosphere, beacon)?;
        let optics = scenario.optics.receiver();
        let lambda = scenario.optics.wavelength;
        Ok(Self {
            zenith_deg,
            path,
            sky_photons: scenario.qkd.sky_photons(&optics, lambda)?,
            crosstalk_photons: scenario.qkd.crosstalk_photons(
                &optics,
                lambda,
                &scenario.channel,
            )?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub altitude: f64,
    pub separation: f64,
    pub zenith_deg: f64,
    pub theta_s: f64,
    pub theta_t: f64,
    pub theta_path: f64,
    pub sigma2_band: f64,
    pub sigma2_path: f64,
    pub sigma2_d: f64,
    pub sigma2_ch: f64,
    pub sigma2_phi: f64,
    pub sigma2_total: f64,
    pub strehl: f64,
    pub eta_trans: f64,
    pub eta_rec: f64,
    pub eta_spec: f64,
    pub eta_det: f64,
    pub eta_geo: f64,
    pub eta_fs: f64,
    pub eta_total: f64,
    pub y0: f64,
    pub q_mu: f64,
    pub q_nu: f64,
    pub e_mu: f64,
    pub e_nu: f64,
    pub y1: f64,
    pub e1: f64,
    pub r: f64,
    pub rate_hz: f64,
    pub status: Status,
}

impl SweepRow {
    pub const COLUMNS: [&'static str; 31] = [
        "scheme",
        "h_alt",
        "L",
        "zenith_deg",
        "theta_s",
        "theta_t",
        "theta_path",
        "sigma2_band",
        "sigma2_path",
        "sigma2_d",
        "sigma2_ch",
        "sigma2_phi",
        "sigma2_total",
        "strehl",
        "eta_trans",
        "eta_rec",
        "eta_spec",
        "eta_det",
        "eta_geo",
        "eta_fs",
        "eta_total",
        "Y0",
        "Q_mu",
        "Q_nu",
        "E_mu",
        "E_nu",
        "Y1",
        "e1",
        "R",
        "rate_hz",
        "status",
    ];

    fn failed(
        scheme: Scheme,
        altitude: f64,
        separation: f64,
        zenith_deg: f64,
        message: String,
    ) -> Self {
        let nan = f64::NAN;
        Self {
            scheme,
            altitude,
            separation,
            zenith_deg,
            theta_s: nan,
            theta_t: nan,
            theta_path: nan,
            sigma2_band: nan,
            sigma2_path: nan,
            sigma2_d: nan,
            sigma2_ch: nan,
            sigma2_phi: nan,
            sigma2_total: nan,
            strehl: nan,
            eta_trans: nan,
            eta_rec: nan,
            eta_spec: nan,
            eta_det: nan,
            eta_geo: nan,
            eta_fs: nan,
            eta_total: nan,
            y0: nan,
            q_mu: nan,
            q_nu: nan,
            e_mu: nan,
            e_nu: nan,
            y1: nan,
            e1: nan,
            r: nan,
            rate_hz: nan,
            status: Status::Failed(message),
        }
    }

    pub fn values(&self) -> Vec<Value> {
        let numbers = [
            self.altitude,
            self.separation,
            self.zenith_deg,
            self.theta_s,
            self.theta_t,
            self.theta_path,
            self.sigma2_band,
            self.sigma2_path,
            self.sigma2_d,
            self.sigma2_ch,
            self.sigma2_phi,
            self.sigma2_total,
            self.strehl,
            self.eta_trans,
            self.eta_rec,
            self.eta_spec,
            self.eta_det,
            self.eta_geo,
            self.eta_fs,
            self.eta_total,
            self.y0,
            self.q_mu,
            self.q_nu,
            self.e_mu,
            self.e_nu,
            self.y1,
            self.e1,
            self.r,
            self.rate_hz,
        ];
        let mut out = Vec::with_capacity(Self::COLUMNS.len());
        out.push(Value::Text(self.scheme.name().to_string()));
        out.extend(numbers.into_iter().map(Value::Number));
        out.push(Value::Text(self.status.to_string()));
        out
    }

    pub fn to_table(rows: &[SweepRow]) -> Table {
        let mut t = Table::new(&Self::COLUMNS);
        t.rows = rows.iter().map(Self::values).collect();
        t
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.status, Status::Failed(_))
    }
}

/// Full pipeline at one grid point.
pub fn evaluate_point(
    scenario: &Scenario,
    scheme: Scheme,
    separation: f64,
    site: &SiteTerms,
) -> SweepRow {
    point(scenario, scheme, separation, site).unwrap_or_else(|e| {
        SweepRow::failed(
            scheme,
            site.path.geometry.altitude,
            separation,
            site.zenith_deg,
            e.to_string(),
        )
    })
}

fn point(
    scenario: &Scenario,
    scheme: Scheme,
    separation: f64,
    site: &SiteTerms,
) -> Result<SweepRow> {
    let cfg = scenario.optics.system(scheme, separation);
    let geom = site.path.geometry;
    let (budget, beam) = site.path.budget(&cfg)?;
    let eff = eta_total(&cfg, &geom, budget.strehl, &scenario.channel)?;
    let crosstalk = if scheme == Scheme::SpatialPioneer {
        site.crosstalk_photons
    } else {
        0.0
    };
    let y0 = background_yield(
        site.sky_photons,
        crosstalk,
        scenario.channel.detection(),
        &scenario.qkd,
    )?;
    let q = evaluate(eff.total, y0, &scenario.qkd)?;
    Ok(SweepRow {
        scheme,
        altitude: geom.altitude,
        separation,
        zenith_deg: site.zenith_deg,
        theta_s: beam.theta_s,
        theta_t: beam.theta_t,
        theta_path: beam.theta_path,
        sigma2_band: budget.band,
        sigma2_path: budget.path,
        sigma2_d: budget.diffraction,
        sigma2_ch: budget.chromatic_path,
        sigma2_phi: budget.chromatic_aniso,
        sigma2_total: budget.total,
        strehl: budget.strehl,
        eta_trans: eff.trans,
        eta_rec: eff.rec,
        eta_spec: eff.spec,
        eta_det: eff.det,
        eta_geo: eff.geo,
        eta_fs: eff.fs,
        eta_total: eff.total,
        y0,
        q_mu: q.q_mu,
        q_nu: q.q_nu,
        e_mu: q.e_mu,
        e_nu: q.e_nu,
        y1: q.y1,
        e1: q.e1,
        r: q.r,
        rate_hz: q.rate_hz,
        status: if q.collapsed {
            Status::Collapsed
        } else {
            Status::Ok
        },
    })
}

/// Evaluate every grid point of the scenario's sweep.
///
/// Rows come out ordered by scheme (as configured), then altitude, separation
/// and zenith angle ascending, whatever the thread count. A point that fails
/// numerically yields a row with NaN values and a `failed` status.
pub fn run_sweep(scenario: &Scenario, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    scenario.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Invalid("thread count must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker threads: {e}")))?;

    let sweep = &scenario.sweep;
    let zeniths = sweep.zenith.points();
    let sites: Vec<(f64, f64)> = sweep
        .altitudes
        .iter()
        .flat_map(|&h| zeniths.iter().map(move |&z| (h, z)))
        .collect();

    Ok(pool.install(|| {
        let terms: Vec<std::result::Result<SiteTerms, String>> = sites
            .par_iter()
            .map(|&(h, z)| SiteTerms::compute(scenario, h, z).map_err(|e| e.to_string()))
            .collect();

        let (nh, nl, nz) = (
            sweep.altitudes.len(),
            sweep.separations.len(),
            zeniths.len(),
        );
        let total = sweep.schemes.len() * nh * nl * nz;
        (0..total)
            .into_par_iter()
            .map(|i| {
                let iz = i % nz;
                let il = (i / nz) % nl;
                let ih = (i / (nz * nl)) % nh;
                let is = i / (nz * nl * nh);
                let (scheme, l) = (sweep.schemes[is], sweep.separations[il]);
                match &terms[ih * nz + iz] {
                    Ok(site) => evaluate_point(scenario, scheme, l, site),
                    Err(m) => {
                        SweepRow::failed(scheme, sweep.altitudes[ih], l, zeniths[iz], m.clone())
                    }
                }
            })
            .collect()
    }))
}
