//! Price history and the return statistics fed to the portfolio encoder.
//!
//! Prices are read from (or written to) a plain CSV with a `date` column
//! followed by one column per ticker. Returns are simple per-period returns;
//! the covariance is the sample covariance with an `rows - 1` denominator.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tickers used to label synthetic series, in column order.
pub const DEFAULT_TICKERS: [&str; 8] = ["TSLA", "AMZN", "GOOG", "AAPL", "FSLR", "SPWR", "ARRY", "ENPH"];

/// Dated close prices, one row per trading day.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    tickers: Vec<String>,
    dates: Vec<NaiveDate>,
    prices: Vec<Vec<f64>>,
}

impl PriceSeries {
    /// Validates and builds a series. Rows must already be in date order.
    pub fn new(tickers: Vec<String>, dates: Vec<NaiveDate>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if prices.len() < 2 {
            return Err(Error::InsufficientHistory(prices.len()));
        }
        if dates.len() != prices.len() {
            return Err(Error::DimensionMismatch {
                expected: prices.len(),
                actual: dates.len(),
            });
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::DuplicateDate(w[1].to_string()));
            }
        }
        for (t, row) in prices.iter().enumerate() {
            if row.len() != tickers.len() {
                return Err(Error::DimensionMismatch {
                    expected: tickers.len(),
                    actual: row.len(),
                });
            }
            for (i, &p) in row.iter().enumerate() {
                if !(p.is_finite() && p > 0.0) {
                    return Err(Error::MalformedPrice {
                        row: t,
                        column: tickers[i].clone(),
                        value: p.to_string(),
                    });
                }
            }
        }
        Ok(Self { tickers, dates, prices })
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    /// `T x n` close prices, row per date.
    pub fn prices(&self) -> &[Vec<f64>] {
        &self.prices
    }

    pub fn n_assets(&self) -> usize {
        self.tickers.len()
    }

    pub fn n_days(&self) -> usize {
        self.dates.len()
    }

    /// Keeps only the first `k` tickers.
    pub fn take_assets(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n_assets() {
            return Err(Error::InvalidArgument(format!(
                "cannot take {k} of {} assets",
                self.n_assets()
            )));
        }
        Ok(Self {
            tickers: self.tickers[..k].to_vec(),
            dates: self.dates.clone(),
            prices: self.prices.iter().map(|r| r[..k].to_vec()).collect(),
        })
    }

    /// Serializes as `date,TICKER1,...` CSV. Prices use the shortest
    /// representation that round-trips, so output is byte-stable.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["date".to_string()];
        header.extend(self.tickers.iter().cloned());
        w.write_record(&header)?;
        for (date, row) in self.dates.iter().zip(&self.prices) {
            let mut rec = vec![date.format("%Y-%m-%d").to_string()];
            rec.extend(row.iter().map(|p| p.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(f)
    }
}

/// Per-asset return mean and covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetStatistics {
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

impl AssetStatistics {
    pub fn n(&self) -> usize {
        self.mu.len()
    }
}

/// Reads a price CSV from disk, optionally restricted to `tickers`.
pub fn load_prices(path: impl AsRef<Path>, tickers: Option<&[String]>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_prices(f, tickers)
}

/// Parses price CSV text. Rows are sorted by date before validation.
pub fn parse_prices<R: Read>(input: R, tickers: Option<&[String]>) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("date") {
        return Err(Error::MalformedCsv("first column must be `date`".into()));
    }
    let available: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let selected: Vec<(usize, String)> = match tickers {
        None => available.iter().cloned().enumerate().collect(),
        Some(wanted) => wanted
            .iter()
            .map(|t| {
                available
                    .iter()
                    .position(|a| a == t)
                    .map(|i| (i, t.clone()))
                    .ok_or_else(|| Error::UnknownTicker(t.clone()))
            })
            .collect::<Result<_>>()?,
    };

    let mut rows: Vec<(NaiveDate, Vec<f64>)> = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let raw_date = rec.get(0).unwrap_or_default();
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d")
            .map_err(|_| Error::MalformedCsv(format!("bad date {raw_date:?} at row {r}")))?;
        let mut row = Vec::with_capacity(selected.len());
        for (col, name) in &selected {
            let cell = rec.get(col + 1).unwrap_or_default();
            let malformed = || Error::MalformedPrice {
                row: r,
                column: name.clone(),
                value: cell.to_string(),
            };
            let p: f64 = cell.parse().map_err(|_| malformed())?;
            if !(p.is_finite() && p > 0.0) {
                return Err(malformed());
            }
            row.push(p);
        }
        rows.push((date, row));
    }
    rows.sort_by_key(|(d, _)| *d);
    let (dates, prices) = rows.into_iter().unzip();
    PriceSeries::new(selected.into_iter().map(|(_, t)| t).collect(), dates, prices)
}

/// Simple returns `(p[t+1] - p[t]) / p[t]`, one row per consecutive pair of dates.
pub fn compute_returns(series: &PriceSeries) -> Vec<Vec<f64>> {
    series
        .prices
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (b - a) / a).collect())
        .collect()
}

/// Column means and the symmetrized sample covariance of a return matrix.
pub fn estimate_statistics(returns: &[Vec<f64>]) -> Result<AssetStatistics> {
    let rows = returns.len();
    if rows < 2 {
        return Err(Error::InsufficientData(rows));
    }
    let n = returns[0].len();
    if let Some(bad) = returns.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bad.len(),
        });
    }
    let t = rows as f64;
    let mut mu = vec![0.0; n];
    for r in returns {
        for (m, x) in mu.iter_mut().zip(r) {
            *m += x;
        }
    }
    mu.iter_mut().for_each(|m| *m /= t);

    let mut s = vec![vec![0.0; n]; n];
    for r in returns {
        for i in 0..n {
            let di = r[i] - mu[i];
            for j in 0..n {
                s[i][j] += di * (r[j] - mu[j]);
            }
        }
    }
    let mut sigma = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            sigma[i][j] = 0.5 * (s[i][j] + s[j][i]) / (t - 1.0);
        }
    }
    Ok(AssetStatistics { mu, sigma })
}

/// Shorthand for `estimate_statistics(&compute_returns(series))`.
pub fn statistics_of(series: &PriceSeries) -> Result<AssetStatistics> {
    estimate_statistics(&compute_returns(series))
}

/// Parameters of the seeded geometric random walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub n_assets: usize,
    pub n_days: usize,
    pub seed: u64,
    /// Per-day expected simple return.
    pub drift: f64,
    /// Per-day return volatility.
    pub vol: f64,
    pub initial_price: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            n_assets: 8,
            n_days: 126,
            seed: 42,
            drift: 0.0005,
            vol: 0.02,
            initial_price: 100.0,
        }
    }
}

/// First date of generated series.
pub fn synthetic_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2016, 7, 1).expect("valid date")
}

/// Generates `p[t+1] = p[t] * (1 + drift + vol * g)` with `g ~ N(0, 1)` drawn
/// from a ChaCha8 stream seeded by `params.seed`, asset-minor within each day.
/// Dates are consecutive weekdays from 2016-07-01.
pub fn generate_synthetic(params: &SyntheticParams) -> Result<PriceSeries> {
    let SyntheticParams {
        n_assets,
        n_days,
        seed,
        drift,
        vol,
        initial_price,
    } = *params;
    if vol < 0.0 || vol.is_nan() {
        return Err(Error::NegativeVolatility(vol));
    }
    if n_assets == 0 {
        return Err(Error::InvalidArgument("n_assets must be at least 1".into()));
    }
    if n_days < 2 {
        return Err(Error::InsufficientHistory(n_days));
    }
    if !(initial_price.is_finite() && initial_price > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "initial price must be positive, got {initial_price}"
        )));
    }

    let tickers = (0..n_assets)
        .map(|i| {
            DEFAULT_TICKERS
                .get(i)
                .map(|t| t.to_string())
                .unwrap_or_else(|| format!("ASSET{i}"))
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prices = Vec::with_capacity(n_days);
    let mut current = vec![initial_price; n_assets];
    prices.push(current.clone());
    for _ in 1..n_days {
        for p in current.iter_mut() {
            let g: f64 = StandardNormal.sample(&mut rng);
            *p *= 1.0 + drift + vol * g;
        }
        prices.push(current.clone());
    }

    PriceSeries::new(tickers, weekdays_from(synthetic_start_date(), n_days), prices)
}

fn weekdays_from(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(rows: &[&[f64]]) -> PriceSeries {
        let n = rows[0].len();
        PriceSeries::new(
            (0..n).map(|i| format!("T{i}")).collect(),
            weekdays_from(synthetic_start_date(), rows.len()),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn parses_two_row_csv() {
        let s = parse_prices("date,A\n2016-07-01,10\n2016-07-02,11".as_bytes(), None).unwrap();
        assert_eq!(s.tickers(), ["A"]);
        assert_eq!(s.prices(), [vec![10.0], vec![11.0]]);
    }

    #[test]
    fn unknown_ticker() {
        let err = parse_prices(
            "date,A\n2016-07-01,10\n2016-07-02,11".as_bytes(),
            Some(&["B".to_string()]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownTicker(t) if t == "B"));
    }

    #[test]
    fn malformed_and_short_inputs() {
        let bad = parse_prices("date,A\n2016-07-01,10\n2016-07-02,-1".as_bytes(), None);
        assert!(matches!(bad, Err(Error::MalformedPrice { .. })));
        let nan = parse_prices("date,A\n2016-07-01,abc\n2016-07-02,1".as_bytes(), None);
        assert!(matches!(nan, Err(Error::MalformedPrice { .. })));
        let short = parse_prices("date,A\n2016-07-01,10".as_bytes(), None);
        assert!(matches!(short, Err(Error::InsufficientHistory(1))));
    }

    #[test]
    fn rows_sorted_by_date_and_subset() {
        let s = parse_prices(
            "date,A,B\n2016-07-05,3,30\n2016-07-01,1,10\n2016-07-04,2,20".as_bytes(),
            Some(&["B".to_string()]),
        )
        .unwrap();
        assert_eq!(s.prices(), [vec![10.0], vec![20.0], vec![30.0]]);
        assert_eq!(s.dates()[0].to_string(), "2016-07-01");
    }

    #[test]
    fn duplicate_dates_rejected() {
        let s = parse_prices("date,A\n2016-07-01,10\n2016-07-01,11".as_bytes(), None);
        assert!(matches!(s, Err(Error::DuplicateDate(_))));
    }

    #[test]
    fn returns_examples() {
        assert_eq!(compute_returns(&series(&[&[10.0], &[10.0], &[10.0]])), [[0.0], [0.0]]);
        let r = compute_returns(&series(&[&[10.0], &[11.0]]));
        assert!((r[0][0] - 0.1).abs() < 1e-15);
        let r = compute_returns(&series(&[&[10.0, 20.0], &[11.0, 19.0], &[11.0, 19.0]]));
        let want = [[0.1, -0.05], [0.0, 0.0]];
        for (row, w) in r.iter().zip(want) {
            for (a, b) in row.iter().zip(w) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn statistics_examples() {
        let s = estimate_statistics(&[vec![0.0], vec![0.0]]).unwrap();
        assert_eq!(s.mu, [0.0]);
        assert_eq!(s.sigma, [[0.0]]);

        let s = estimate_statistics(&[vec![0.1], vec![-0.1]]).unwrap();
        assert!(s.mu[0].abs() < 1e-15);
        assert!((s.sigma[0][0] - 0.02).abs() < 1e-15);

        assert!(matches!(
            estimate_statistics(&[vec![0.1]]),
            Err(Error::InsufficientData(1))
        ));
    }

    #[test]
    fn flat_walk_and_determinism() {
        let p = SyntheticParams {
            n_assets: 3,
            n_days: 10,
            drift: 0.0,
            vol: 0.0,
            ..Default::default()
        };
        let s = generate_synthetic(&p).unwrap();
        assert!(s.prices().iter().flatten().all(|&x| x == 100.0));

        let p = SyntheticParams::default();
        assert_eq!(generate_synthetic(&p).unwrap(), generate_synthetic(&p).unwrap());
    }

    #[test]
    fn negative_vol_rejected() {
        let p = SyntheticParams {
            vol: -0.1,
            ..Default::default()
        };
        assert!(matches!(generate_synthetic(&p), Err(Error::NegativeVolatility(_))));
    }

    #[test]
    fn csv_round_trip() {
        let s = generate_synthetic(&SyntheticParams {
            n_days: 20,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(parse_prices(buf.as_slice(), None).unwrap(), s);
    }
}
