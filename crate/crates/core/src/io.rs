//! Plain-text tables: CSV with `#` comment lines, used for every data
//! file the toolkit reads or writes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numcore::{Rect, SampledField};

/// 17 significant digits, enough to round-trip an `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            for line in c.lines() {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_float(x))).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("utf-8 cells"));
        out
    }

    /// Parses leading `#` comment lines, one header line, then numeric rows
    /// of the header's width. Blank lines and later comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = CsvTable::default();
        let mut offset = 0;
        let mut skipped = 0;
        for line in text.split_inclusive('\n') {
            let t = line.trim();
            if let Some(c) = t.strip_prefix('#') {
                table.comments.push(c.trim_start().to_string());
            } else if !t.is_empty() {
                break;
            }
            offset += line.len();
            skipped += 1;
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(&text.as_bytes()[offset..]);
        let line_of = |e: &csv::Error| e.position().map_or(0, |p| p.line() as usize + skipped);
        let header = reader.headers().map_err(|e| Error::parse(line_of(&e), e.to_string()))?;
        if header.is_empty() {
            return Err(Error::parse(0, "missing header line"));
        }
        table.header = header.iter().map(str::to_string).collect();
        if table.header.iter().any(|h| h.is_empty()) {
            return Err(Error::parse(skipped + 1, "empty column name"));
        }
        for record in reader.records() {
            let record = record.map_err(|e| match e.kind() {
                csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::parse(
                    line_of(&e),
                    format!("expected {expected_len} columns, found {len}"),
                ),
                _ => Error::parse(line_of(&e), e.to_string()),
            })?;
            let line_no = record.position().map_or(0, |p| p.line() as usize + skipped);
            let row = record
                .iter()
                .map(|cell| match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    Ok(_) => Err(Error::parse(line_no, "non-finite value")),
                    Err(_) => Err(Error::parse(line_no, format!("not a number: {cell:?}"))),
                })
                .collect::<Result<Vec<f64>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }

    pub(crate) fn require(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.column(n)
                    .ok_or_else(|| Error::parse(0, format!("missing column {n:?}")))
            })
            .collect()
    }
}

/// Envelope samples: columns `y,re_g,im_g` (or `y,g` for real tables).
pub fn parse_envelope_table(text: &str) -> Result<Vec<(f64, Complex64)>> {
    let table = CsvTable::parse(text)?;
    let y = table.require(&["y"])?[0];
    let (re, im) = match (table.column("re_g"), table.column("im_g"), table.column("g")) {
        (Some(re), Some(im), _) => (re, Some(im)),
        (_, _, Some(g)) => (g, None),
        _ => return Err(Error::parse(0, "expected columns re_g,im_g or g")),
    };
    Ok(table
        .rows
        .iter()
        .map(|r| (r[y], Complex64::new(r[re], im.map_or(0.0, |i| r[i]))))
        .collect())
}

/// Sampled potential: columns `x,y,re_v,im_v` covering a uniform grid,
/// rows in any order.
pub fn parse_sampled_field(text: &str) -> Result<SampledField> {
    let table = CsvTable::parse(text)?;
    let cols = table.require(&["x", "y", "re_v", "im_v"])?;
    if table.rows.is_empty() {
        return Err(Error::parse(0, "no samples"));
    }
    let distinct = |c: usize| {
        let mut v: Vec<f64> = table.rows.iter().map(|r| r[c]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let xs = distinct(cols[0]);
    let ys = distinct(cols[1]);
    let (nx, ny) = (xs.len(), ys.len());
    if nx < 2 || ny < 2 {
        return Err(Error::parse(0, "need at least two distinct x and y values"));
    }
    if table.rows.len() != nx * ny {
        return Err(Error::parse(
            0,
            format!("{} rows do not fill a {nx}x{ny} grid", table.rows.len()),
        ));
    }
    let uniform = |v: &[f64]| {
        let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
        v.iter()
            .enumerate()
            .all(|(i, &t)| (t - (v[0] + h * i as f64)).abs() <= 1e-9 * h.max(1.0))
    };
    if !uniform(&xs) || !uniform(&ys) {
        return Err(Error::parse(0, "sample coordinates are not uniformly spaced"));
    }
    let rect = Rect::new(xs[0], xs[nx - 1], ys[0], ys[ny - 1])?;
    let index = |v: &[f64], t: f64| v.binary_search_by(|p| p.total_cmp(&t)).expect("distinct value");
    let mut values = vec![Complex64::new(f64::NAN, 0.0); nx * ny];
    for r in &table.rows {
        let slot = index(&xs, r[cols[0]]) * ny + index(&ys, r[cols[1]]);
        if !values[slot].re.is_nan() {
            return Err(Error::parse(0, format!("duplicate sample at ({}, {})", r[cols[0]], r[cols[1]])));
        }
        values[slot] = Complex64::new(r[cols[2]], r[cols[3]]);
    }
    SampledField::new(rect, nx, ny, values)
}

/// Inverse of [`parse_sampled_field`].
pub fn sampled_field_table(field: &SampledField) -> CsvTable {
    let mut table = CsvTable::new(&["x", "y", "re_v", "im_v"]);
    let (nx, ny) = field.shape();
    let r = field.rect();
    let (hx, hy) = field.cell_size();
    for ix in 0..nx {
        for iy in 0..ny {
            let v = field.values()[ix * ny + iy];
            table.push(vec![r.x0 + hx * ix as f64, r.y0 + hy * iy as f64, v.re, v.im]);
        }
    }
    table
}
