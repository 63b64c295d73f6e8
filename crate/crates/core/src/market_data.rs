//! Return/volume/liquidity panels: synthetic generation and CSV ingestion.
//!
//! A [`ReturnPanel`] is the unit of exchange between the simulator and the
//! analysis pipeline: T periods by N assets of returns, prices, volumes,
//! bid-ask spreads and depths, plus asset metadata. Synthetic panels draw
//! correlated Gaussian returns from a sector-block target correlation
//! matrix and are bit-reproducible from their seed.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base price all synthetic assets start from. Returns are scale-free, so
/// the level is arbitrary but must be fixed for replay determinism.
pub const BASE_PRICE: f64 = 100.0;

/// Default relative bid-ask spread (fraction of price) when no spread
/// series is simulated or supplied.
pub const DEFAULT_SPREAD_FRAC: f64 = 0.0005;

/// Default order-book depth in shares when none is supplied.
pub const DEFAULT_DEPTH: f64 = 1.0e4;

/// Median of the default log-normal volume process, in shares.
pub const DEFAULT_VOLUME_MEDIAN: f64 = 1.0e6;

/// Log standard deviation of the default volume process.
pub const DEFAULT_VOLUME_LOG_SD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    Technology,
    Banking,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetMeta {
    pub symbol: String,
    pub sector: Sector,
}

impl AssetMeta {
    pub fn new(symbol: impl Into<String>, sector: Sector) -> Self {
        Self {
            symbol: symbol.into(),
            sector,
        }
    }
}

/// T x N panel of market data. All matrices share dimensions; prices are
/// strictly positive and consistent with returns when both come from the
/// same source.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    pub returns: DMatrix<f64>,
    pub prices: DMatrix<f64>,
    pub volumes: DMatrix<f64>,
    pub spreads: DMatrix<f64>,
    pub depths: DMatrix<f64>,
    pub assets: Vec<AssetMeta>,
    pub period_label: String,
    /// Data-quality notes accumulated while building the panel
    /// (defaulted series, projections, clamps).
    pub flags: Vec<String>,
}

impl ReturnPanel {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        returns: DMatrix<f64>,
        prices: DMatrix<f64>,
        volumes: DMatrix<f64>,
        spreads: DMatrix<f64>,
        depths: DMatrix<f64>,
        assets: Vec<AssetMeta>,
        period_label: impl Into<String>,
        flags: Vec<String>,
    ) -> Result<Self> {
        let panel = Self {
            returns,
            prices,
            volumes,
            spreads,
            depths,
            assets,
            period_label: period_label.into(),
            flags,
        };
        panel.validate()?;
        Ok(panel)
    }

    pub fn n_periods(&self) -> usize {
        self.returns.nrows()
    }

    pub fn n_assets(&self) -> usize {
        self.returns.ncols()
    }

    pub fn symbols(&self) -> Vec<String> {
        self.assets.iter().map(|a| a.symbol.clone()).collect()
    }

    /// One asset's return series as an owned vector.
    pub fn returns_col(&self, asset: usize) -> Vec<f64> {
        self.returns.column(asset).iter().copied().collect()
    }

    pub fn validate(&self) -> Result<()> {
        let (t, n) = (self.returns.nrows(), self.returns.ncols());
        if t < 2 {
            return Err(Error::validation(format!(
                "panel needs at least 2 periods, got {t}"
            )));
        }
        if n < 1 {
            return Err(Error::validation("panel needs at least 1 asset"));
        }
        for (name, m) in [
            ("prices", &self.prices),
            ("volumes", &self.volumes),
            ("spreads", &self.spreads),
            ("depths", &self.depths),
        ] {
            if m.nrows() != t || m.ncols() != n {
                return Err(Error::validation(format!(
                    "{name} matrix is {}x{}, expected {t}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if self.assets.len() != n {
            return Err(Error::validation(format!(
                "{} asset records for {n} columns",
                self.assets.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.assets {
            if !seen.insert(a.symbol.as_str()) {
                return Err(Error::validation(format!(
                    "duplicate symbol {:?}",
                    a.symbol
                )));
            }
        }
        if self.prices.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::validation("prices must be strictly positive"));
        }
        if self.volumes.iter().any(|&v| v < 0.0) || self.spreads.iter().any(|&s| s < 0.0) {
            return Err(Error::validation("volumes and spreads must be nonnegative"));
        }
        if self.depths.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::validation("depths must be strictly positive"));
        }
        Ok(())
    }
}

/// Specification for the synthetic panel generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub assets: Vec<AssetMeta>,
    pub n_periods: usize,
    pub intra_tech_corr: f64,
    pub intra_bank_corr: f64,
    pub cross_corr: f64,
    pub per_period_vol: f64,
    pub drift: f64,
    pub seed: u64,
    pub period_label: String,
}

impl Default for SyntheticSpec {
    /// Eight large-cap assets (five technology, three banking) over 150
    /// periods with sector correlations 0.6 / 0.7, cross-sector 0.3.
    fn default() -> Self {
        let tech = ["AAPL", "GOOGL", "MSFT", "TSLA", "AMZN"];
        let bank = ["JPM", "BAC", "GS"];
        let assets = tech
            .iter()
            .map(|s| AssetMeta::new(*s, Sector::Technology))
            .chain(bank.iter().map(|s| AssetMeta::new(*s, Sector::Banking)))
            .collect();
        Self {
            assets,
            n_periods: 150,
            intra_tech_corr: 0.6,
            intra_bank_corr: 0.7,
            cross_corr: 0.3,
            per_period_vol: 0.017,
            drift: 0.0,
            seed: 42,
            period_label: "1min".to_string(),
        }
    }
}

impl SyntheticSpec {
    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.assets.is_empty() {
            return Err(Error::validation("synthetic spec needs at least 1 asset"));
        }
        if self.n_periods < 2 {
            return Err(Error::validation("synthetic spec needs at least 2 periods"));
        }
        for (name, c) in [
            ("intra_tech_corr", self.intra_tech_corr),
            ("intra_bank_corr", self.intra_bank_corr),
            ("cross_corr", self.cross_corr),
        ] {
            if !(-1.0..=1.0).contains(&c) {
                return Err(Error::validation(format!("{name} = {c} outside [-1, 1]")));
            }
        }
        if !(self.per_period_vol > 0.0) {
            return Err(Error::validation("per_period_vol must be positive"));
        }
        if !self.drift.is_finite() {
            return Err(Error::validation("drift must be finite"));
        }
        Ok(())
    }
}

/// Target correlation matrix plus whether a PSD projection was needed.
#[derive(Debug, Clone)]
pub struct TargetCorrelation {
    pub matrix: DMatrix<f64>,
    pub projected: bool,
}

/// Sector-block target correlation: intra-technology pairs get
/// `intra_tech_corr`, intra-banking pairs `intra_bank_corr`, every other
/// pair (cross-sector and within `Other`) `cross_corr`. Non-PSD inputs
/// are projected to the nearest PSD correlation matrix by eigenvalue
/// clipping and diagonal renormalization.
pub fn build_target_correlation(spec: &SyntheticSpec) -> Result<TargetCorrelation> {
    spec.validate()?;
    let n = spec.n_assets();
    let mut c = DMatrix::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = match (spec.assets[i].sector, spec.assets[j].sector) {
                (Sector::Technology, Sector::Technology) => spec.intra_tech_corr,
                (Sector::Banking, Sector::Banking) => spec.intra_bank_corr,
                _ => spec.cross_corr,
            };
            c[(i, j)] = r;
            c[(j, i)] = r;
        }
    }
    let (matrix, projected) = nearest_psd_correlation(c);
    Ok(TargetCorrelation { matrix, projected })
}

/// Eigenvalue floor below which a symmetric matrix is treated as not PSD.
const PSD_TOL: f64 = 1e-10;

/// Clip negative eigenvalues at zero and renormalize to unit diagonal.
/// Returns the (possibly unchanged) matrix and whether clipping happened.
pub fn nearest_psd_correlation(c: DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let eig = SymmetricEigen::new(c.clone());
    if eig.eigenvalues.iter().all(|&l| l >= -PSD_TOL) {
        return (c, false);
    }
    let clipped = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| l.max(0.0)),
    );
    let v = &eig.eigenvectors;
    let mut m = v * DMatrix::from_diagonal(&clipped) * v.transpose();
    // renormalize to a correlation matrix
    let d: Vec<f64> = (0..m.nrows()).map(|i| m[(i, i)].max(1e-300).sqrt()).collect();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            m[(i, j)] /= d[i] * d[j];
        }
    }
    for i in 0..m.nrows() {
        m[(i, i)] = 1.0;
    }
    (m, true)
}

/// Factor a PSD matrix as L with L L' = C via symmetric eigendecomposition.
/// Unlike Cholesky this tolerates singular targets (perfectly correlated
/// blocks).
fn psd_factor(c: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(c.clone());
    let sqrt_l = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()),
    );
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_l)
}

/// Generate a synthetic panel: correlated Gaussian returns, multiplicative
/// prices from [`BASE_PRICE`], log-normal volumes, proportional spreads and
/// constant depths. Pure function of the spec including its seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<ReturnPanel> {
    let target = build_target_correlation(spec)?;
    let n = spec.n_assets();
    let t = spec.n_periods;
    let factor = psd_factor(&target.matrix);

    let mut flags = Vec::new();
    if target.projected {
        flags.push("target correlation projected to nearest PSD".to_string());
    }

    let mut rng_returns = ChaCha12Rng::seed_from_u64(spec.seed);
    rng_returns.set_stream(0);
    let mut rng_volumes = ChaCha12Rng::seed_from_u64(spec.seed);
    rng_volumes.set_stream(1);

    let mut returns = DMatrix::zeros(t, n);
    let mut prices = DMatrix::zeros(t, n);
    let mut clamped = 0usize;
    for ti in 0..t {
        let z = DVector::from_iterator(n, (0..n).map(|_| rng_returns.sample::<f64, _>(StandardNormal)));
        let shock = &factor * z;
        for a in 0..n {
            let mut r = spec.drift + spec.per_period_vol * shock[a];
            if r <= -1.0 {
                r = -0.99;
                clamped += 1;
            }
            returns[(ti, a)] = r;
            let prev = if ti == 0 { BASE_PRICE } else { prices[(ti - 1, a)] };
            prices[(ti, a)] = prev * (1.0 + r);
        }
    }
    if clamped > 0 {
        flags.push(format!("{clamped} returns clamped above -1"));
    }

    let log_median = DEFAULT_VOLUME_MEDIAN.ln();
    let volumes = DMatrix::from_fn(t, n, |_, _| {
        let z: f64 = rng_volumes.sample(StandardNormal);
        (log_median + DEFAULT_VOLUME_LOG_SD * z).exp()
    });
    let spreads = prices.map(|p| DEFAULT_SPREAD_FRAC * p);
    let depths = DMatrix::from_element(t, n, DEFAULT_DEPTH);

    ReturnPanel::from_parts(
        returns,
        prices,
        volumes,
        spreads,
        depths,
        spec.assets.clone(),
        spec.period_label.clone(),
        flags,
    )
}

/// Which matrix the main CSV file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CsvLayout {
    Returns,
    Prices,
}

fn sibling_path(path: &Path, kind: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("panel");
    path.with_file_name(format!("{stem}.{kind}.csv"))
}

/// Write one T x N matrix as CSV: header `t,SYM1,...`, one row per period.
pub fn write_matrix_csv(path: &Path, symbols: &[String], m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io_error(path, e))?;
    let mut header = vec!["t".to_string()];
    header.extend_from_slice(symbols);
    w.write_record(&header).map_err(|e| csv_io_error(path, e))?;
    for t in 0..m.nrows() {
        let mut rec = vec![t.to_string()];
        for a in 0..m.ncols() {
            rec.push(format!("{}", m[(t, a)]));
        }
        w.write_record(&rec).map_err(|e| csv_io_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn csv_io_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            row: 0,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Read a matrix CSV produced by [`write_matrix_csv`] (or hand-authored in
/// the same layout). The leading `t` index column is optional.
pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = raw.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        row: 1,
        column: 1,
        message: "empty file".to_string(),
    })?;
    let mut cols: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let has_index = cols.first().map(|c| c == "t").unwrap_or(false);
    if has_index {
        cols.remove(0);
    }
    if cols.is_empty() || cols.iter().any(|c| c.is_empty()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            row: 1,
            column: 1,
            message: "header must list asset symbols".to_string(),
        });
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for (j, c) in cols.iter().enumerate() {
            if !seen.insert(c.as_str()) {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row: 1,
                    column: j + 1 + usize::from(has_index),
                    message: format!("duplicate symbol {c:?}"),
                });
            }
        }
    }
    let n = cols.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let expected = n + usize::from(has_index);
        if cells.len() != expected {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: line_idx + 1,
                column: cells.len().min(expected),
                message: format!("expected {expected} cells, found {}", cells.len()),
            });
        }
        let mut row = Vec::with_capacity(n);
        for (j, cell) in cells.iter().skip(usize::from(has_index)).enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row: line_idx + 1,
                column: j + 1 + usize::from(has_index),
                message: format!("non-numeric cell {cell:?}"),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let t = rows.len();
    let m = DMatrix::from_fn(t, n, |i, j| rows[i][j]);
    Ok((cols, m))
}

/// Load a panel from CSV. The main file holds returns or prices per
/// `layout`; sibling files `<stem>.{prices,volumes,spreads,depths}.csv`
/// are picked up when present, otherwise the documented defaults fill in
/// and the panel is flagged.
pub fn load_panel_csv(path: &Path, layout: CsvLayout) -> Result<ReturnPanel> {
    let (symbols, main) = read_matrix_csv(path)?;
    let n = symbols.len();
    let mut flags = Vec::new();

    let (returns, prices) = match layout {
        CsvLayout::Prices => {
            let t = main.nrows();
            if t < 2 {
                return Err(Error::validation(format!(
                    "price panel needs at least 2 rows, got {t}"
                )));
            }
            if main.iter().any(|&p| !(p > 0.0)) {
                return Err(Error::validation("prices must be strictly positive"));
            }
            // First return row relates the first price to the base price so
            // that dimensions stay T x N; flagged because it is synthetic.
            let mut r = DMatrix::zeros(t, n);
            for a in 0..n {
                r[(0, a)] = 0.0;
                for ti in 1..t {
                    r[(ti, a)] = main[(ti, a)] / main[(ti - 1, a)] - 1.0;
                }
            }
            flags.push("returns derived from prices; first row set to 0".to_string());
            (r, main)
        }
        CsvLayout::Returns => {
            let prices_path = sibling_path(path, "prices");
            let prices = if prices_path.exists() {
                let (psyms, p) = read_matrix_csv(&prices_path)?;
                if psyms != symbols || p.nrows() != main.nrows() {
                    return Err(Error::validation(format!(
                        "prices sibling {} does not match the main panel",
                        prices_path.display()
                    )));
                }
                p
            } else {
                flags.push(format!("prices rebuilt from base {BASE_PRICE}"));
                let mut p = DMatrix::zeros(main.nrows(), n);
                for a in 0..n {
                    let mut level = BASE_PRICE;
                    for ti in 0..main.nrows() {
                        level *= 1.0 + main[(ti, a)];
                        p[(ti, a)] = level;
                    }
                }
                p
            };
            (main, prices)
        }
    };

    let t = returns.nrows();
    let mut load_series = |kind: &str, default: DMatrix<f64>| -> Result<DMatrix<f64>> {
        let p = sibling_path(path, kind);
        if p.exists() {
            let (syms, m) = read_matrix_csv(&p)?;
            if syms != symbols || m.nrows() != t {
                return Err(Error::validation(format!(
                    "{kind} sibling {} does not match the main panel",
                    p.display()
                )));
            }
            Ok(m)
        } else {
            flags.push(format!("{kind} series missing; default applied"));
            Ok(default)
        }
    };

    let volumes = load_series("volumes", DMatrix::from_element(t, n, DEFAULT_VOLUME_MEDIAN))?;
    let spreads = load_series("spreads", prices.map(|p| DEFAULT_SPREAD_FRAC * p))?;
    let depths = load_series("depths", DMatrix::from_element(t, n, DEFAULT_DEPTH))?;

    let assets = symbols
        .into_iter()
        .map(|s| AssetMeta::new(s, Sector::Other))
        .collect();
    ReturnPanel::from_parts(
        returns, prices, volumes, spreads, depths, assets, "loaded", flags,
    )
}

/// Export a panel in the layout [`load_panel_csv`] accepts: returns in the
/// main file plus prices/volumes/spreads/depths siblings. Numeric cells use
/// shortest round-trip formatting, so load(export(p)) reproduces p exactly.
pub fn export_panel_csv(panel: &ReturnPanel, path: &Path) -> Result<()> {
    let symbols = panel.symbols();
    write_matrix_csv(path, &symbols, &panel.returns)?;
    write_matrix_csv(&sibling_path(path, "prices"), &symbols, &panel.prices)?;
    write_matrix_csv(&sibling_path(path, "volumes"), &symbols, &panel.volumes)?;
    write_matrix_csv(&sibling_path(path, "spreads"), &symbols, &panel.spreads)?;
    write_matrix_csv(&sibling_path(path, "depths"), &symbols, &panel.depths)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_sector_spec(n_tech: usize, n_bank: usize) -> SyntheticSpec {
        let mut assets = Vec::new();
        for i in 0..n_tech {
            assets.push(AssetMeta::new(format!("T{i}"), Sector::Technology));
        }
        for i in 0..n_bank {
            assets.push(AssetMeta::new(format!("B{i}"), Sector::Banking));
        }
        SyntheticSpec {
            assets,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn target_correlation_single_asset() {
        let spec = two_sector_spec(1, 0);
        let c = build_target_correlation(&spec).unwrap();
        assert_eq!(c.matrix.nrows(), 1);
        assert_abs_diff_eq!(c.matrix[(0, 0)], 1.0);
        assert!(!c.projected);
    }

    #[test]
    fn target_correlation_default_blocks() {
        let spec = SyntheticSpec::default();
        let c = build_target_correlation(&spec).unwrap().matrix;
        let mut n06 = 0;
        let mut n07 = 0;
        let mut n03 = 0;
        for i in 0..8 {
            for j in (i + 1)..8 {
                let v = c[(i, j)];
                if (v - 0.6).abs() < 1e-12 {
                    n06 += 1;
                } else if (v - 0.7).abs() < 1e-12 {
                    n07 += 1;
                } else if (v - 0.3).abs() < 1e-12 {
                    n03 += 1;
                }
            }
        }
        assert_eq!((n06, n07, n03), (10, 3, 15));
    }

    #[test]
    fn target_correlation_perfect_block_is_psd() {
        let mut spec = two_sector_spec(2, 0);
        spec.intra_tech_corr = 1.0;
        let c = build_target_correlation(&spec).unwrap();
        assert!(!c.projected);
        assert_abs_diff_eq!(c.matrix[(0, 1)], 1.0);
    }

    #[test]
    fn target_correlation_projects_non_psd() {
        // three assets pairwise correlated -0.9 is not PSD
        let mut spec = two_sector_spec(3, 0);
        spec.intra_tech_corr = -0.9;
        let c = build_target_correlation(&spec).unwrap();
        assert!(c.projected);
        let eig = SymmetricEigen::new(c.matrix.clone());
        assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-10));
        for i in 0..3 {
            assert_abs_diff_eq!(c.matrix[(i, i)], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn correlation_bounds_rejected() {
        let mut spec = SyntheticSpec::default();
        spec.cross_corr = 1.5;
        assert!(build_target_correlation(&spec).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = SyntheticSpec {
            seed: 42,
            ..SyntheticSpec::default()
        };
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generator_matches_target_correlation_at_large_t() {
        let spec = SyntheticSpec {
            n_periods: 10_000,
            seed: 7,
            ..SyntheticSpec::default()
        };
        let panel = generate_synthetic(&spec).unwrap();
        let target = build_target_correlation(&spec).unwrap().matrix;
        let cols: Vec<Vec<f64>> = (0..panel.n_assets()).map(|a| panel.returns_col(a)).collect();
        let sample = crate::stats::correlation_matrix(&cols);
        for i in 0..8 {
            for j in 0..8 {
                assert!(
                    (sample[(i, j)] - target[(i, j)]).abs() < 0.05,
                    "corr[{i}][{j}] = {} vs target {}",
                    sample[(i, j)],
                    target[(i, j)]
                );
            }
        }
    }

    #[test]
    fn generator_volatility_matches_spec() {
        let spec = SyntheticSpec {
            n_periods: 10_000,
            per_period_vol: 0.017,
            seed: 3,
            ..SyntheticSpec::default()
        };
        let panel = generate_synthetic(&spec).unwrap();
        for a in 0..panel.n_assets() {
            let sd = crate::stats::sample_std(&panel.returns_col(a));
            assert!(
                (sd - 0.017).abs() < 0.0017,
                "asset {a} sd {sd} not within 10% of 0.017"
            );
        }
    }

    #[test]
    fn prices_consistent_with_returns() {
        let panel = generate_synthetic(&SyntheticSpec::default()).unwrap();
        for a in 0..panel.n_assets() {
            for t in 1..panel.n_periods() {
                let implied = panel.prices[(t, a)] / panel.prices[(t - 1, a)] - 1.0;
                assert_abs_diff_eq!(implied, panel.returns[(t, a)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn csv_price_layout_derives_returns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("px.csv");
        std::fs::write(&path, "t,A,B\n0,100,100\n1,101,99\n2,102.01,99\n").unwrap();
        let panel = load_panel_csv(&path, CsvLayout::Prices).unwrap();
        assert_abs_diff_eq!(panel.returns[(1, 0)], 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(panel.returns[(1, 1)], -0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(panel.returns[(2, 0)], 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(panel.returns[(2, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_empty_file_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "").unwrap();
        match load_panel_csv(&path, CsvLayout::Returns) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("empty")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_ragged_row_names_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ragged.csv");
        std::fs::write(&path, "t,A,B\n0,0.01,0.02\n1,0.01\n").unwrap();
        match load_panel_csv(&path, CsvLayout::Returns) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_non_numeric_names_cell() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "t,A,B\n0,0.01,x\n1,0.0,0.0\n").unwrap();
        match load_panel_csv(&path, CsvLayout::Returns) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, 3);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_duplicate_symbols_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.csv");
        std::fs::write(&path, "t,A,A\n0,0.01,0.02\n1,0.0,0.0\n").unwrap();
        assert!(matches!(
            load_panel_csv(&path, CsvLayout::Returns),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn csv_round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("panel.csv");
        let spec = SyntheticSpec {
            n_periods: 20,
            ..SyntheticSpec::default()
        };
        let panel = generate_synthetic(&spec).unwrap();
        export_panel_csv(&panel, &path).unwrap();
        let loaded = load_panel_csv(&path, CsvLayout::Returns).unwrap();
        assert_eq!(loaded.n_periods(), panel.n_periods());
        assert_eq!(loaded.symbols(), panel.symbols());
        for t in 0..panel.n_periods() {
            for a in 0..panel.n_assets() {
                for (name, x, y) in [
                    ("returns", panel.returns[(t, a)], loaded.returns[(t, a)]),
                    ("prices", panel.prices[(t, a)], loaded.prices[(t, a)]),
                    ("volumes", panel.volumes[(t, a)], loaded.volumes[(t, a)]),
                    ("spreads", panel.spreads[(t, a)], loaded.spreads[(t, a)]),
                    ("depths", panel.depths[(t, a)], loaded.depths[(t, a)]),
                ] {
                    assert!(
                        (x - y).abs() <= 1e-12,
                        "{name}[{t},{a}]: {x} vs {y}"
                    );
                }
            }
        }
    }

    #[test]
    fn matrix_csv_empty_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hdr.csv");
        let m = DMatrix::<f64>::zeros(0, 2);
        write_matrix_csv(&path, &["A".to_string(), "B".to_string()], &m).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert_eq!(body, "t,A,B\n");
    }

    #[test]
    fn default_panel_exports_151_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let panel = generate_synthetic(&SyntheticSpec::default()).unwrap();
        export_panel_csv(&panel, &path).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert_eq!(body.lines().count(), 151);
    }
}
