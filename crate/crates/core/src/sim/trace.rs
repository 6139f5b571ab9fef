//! Logged simulation output and its CSV form.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 20] = [
    "t", "v_lead", "v_follow", "gap", "s_star", "R", "eta_c", "a_driver", "h", "h_n", "h_a", "a_combined",
    "eps1", "eps2", "psi_n", "psi_a", "xi0", "xi1", "xi2", "clamped",
];

/// One logged step. Controller commands (`h`, `h_n`, `h_a`) are in the
/// acceleration sense: positive speeds the follower up.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceRow {
    pub t: f64,
    pub v_lead: f64,
    pub v_follow: f64,
    pub gap: f64,
    pub s_star: f64,
    pub r: f64,
    /// Authority share actually applied (0 while disengaged).
    pub eta_c: f64,
    pub a_driver: f64,
    pub h: f64,
    pub h_n: f64,
    pub h_a: f64,
    pub a_combined: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub psi_n: f64,
    pub psi_a: f64,
    pub xi: [f64; 3],
    pub clamped: bool,
}

impl TraceRow {
    pub fn values(&self) -> [f64; 20] {
        [
            self.t,
            self.v_lead,
            self.v_follow,
            self.gap,
            self.s_star,
            self.r,
            self.eta_c,
            self.a_driver,
            self.h,
            self.h_n,
            self.h_a,
            self.a_combined,
            self.eps1,
            self.eps2,
            self.psi_n,
            self.psi_a,
            self.xi[0],
            self.xi[1],
            self.xi[2],
            if self.clamped { 1.0 } else { 0.0 },
        ]
    }

    fn from_values(v: &[f64; 20]) -> Self {
        Self {
            t: v[0],
            v_lead: v[1],
            v_follow: v[2],
            gap: v[3],
            s_star: v[4],
            r: v[5],
            eta_c: v[6],
            a_driver: v[7],
            h: v[8],
            h_n: v[9],
            h_a: v[10],
            a_combined: v[11],
            eps1: v[12],
            eps2: v[13],
            psi_n: v[14],
            psi_a: v[15],
            xi: [v[16], v[17], v[18]],
            clamped: v[19] != 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    /// Time of the step on which the gap first became non-positive.
    pub collision_time: Option<f64>,
}

impl Trace {
    pub fn column_index(name: &str) -> Option<usize> {
        TRACE_HEADER.iter().position(|&h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = Self::column_index(name)?;
        Some(self.rows.iter().map(|r| r.values()[i]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let map = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(TRACE_HEADER).map_err(map)?;
        for row in &self.rows {
            let mut fields: Vec<String> = row.values()[..19].iter().map(|v| v.to_string()).collect();
            fields.push(if row.clamped { "1" } else { "0" }.to_string());
            w.write_record(&fields).map_err(map)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write(std::io::BufWriter::new(file))
    }

    /// Parses a trace CSV. The header must match [`TRACE_HEADER`] exactly.
    /// The collision time is recovered from the first row with `gap <= 0`.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut records = rdr.records();
        let header = match records.next() {
            Some(r) => r.map_err(|e| Error::Parse { line: 1, message: e.to_string() })?,
            None => return Err(Error::Parse { line: 1, message: "empty trace file".into() }),
        };
        if header.iter().ne(TRACE_HEADER.iter().copied()) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{}`", TRACE_HEADER.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in records.enumerate() {
            let line = i as u64 + 2;
            let rec = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
            if rec.len() != TRACE_HEADER.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", TRACE_HEADER.len(), rec.len()),
                });
            }
            let mut values = [0.0; 20];
            for (slot, (field, name)) in values.iter_mut().zip(rec.iter().zip(TRACE_HEADER)) {
                *slot = field.trim().parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("column `{name}`: cannot parse `{field}`"),
                })?;
            }
            rows.push(TraceRow::from_values(&values));
        }
        let trace = Trace { collision_time: None, rows };
        Ok(Trace { collision_time: detect_collision(&trace), ..trace })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file))
    }
}

/// Time of the first logged row with a non-positive gap.
pub fn detect_collision(tr: &Trace) -> Option<f64> {
    tr.rows.iter().find(|r| r.gap <= 0.0).map(|r| r.t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, gap: f64) -> TraceRow {
        TraceRow { t, gap, v_lead: 1.0 / 3.0, xi: [0.1, 1e-300, -2.5e17], clamped: t > 0.15, ..TraceRow::default() }
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        Trace::default().write(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,v_lead,v_follow,gap,s_star,R,eta_c,a_driver,h,h_n,h_a,a_combined,eps1,eps2,psi_n,psi_a,xi0,xi1,xi2,clamped\n"
        );
    }

    #[test]
    fn round_trip_is_lossless() {
        let tr = Trace { rows: vec![row(0.0, 30.0), row(0.1, 29.123456789012345), row(0.2, 0.1)], collision_time: None };
        let mut buf = Vec::new();
        tr.write(&mut buf).unwrap();
        assert_eq!(Trace::read(&buf[..]).unwrap(), tr);
    }

    #[test]
    fn collision_scan() {
        let mut tr = Trace { rows: (0..500).map(|i| row(i as f64 * 0.1, 10.0)).collect(), collision_time: None };
        assert_eq!(detect_collision(&tr), None);
        tr.rows[412].gap = -0.01;
        tr.rows[413].gap = -0.5;
        assert_eq!(detect_collision(&tr), Some(tr.rows[412].t));
    }

    #[test]
    fn bad_header_and_rows_are_rejected() {
        assert!(Trace::read("t,v\n".as_bytes()).is_err());
        let mut buf = Vec::new();
        Trace { rows: vec![row(0.0, 1.0)], collision_time: None }.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("0.1,", "x,");
        match Trace::read(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn columns() {
        let tr = Trace { rows: vec![row(0.0, 3.0), row(0.1, 2.0)], collision_time: None };
        assert_eq!(tr.column("gap").unwrap(), vec![3.0, 2.0]);
        assert_eq!(tr.column("clamped").unwrap(), vec![0.0, 0.0]);
        assert!(tr.column("nonexistent").is_none());
    }
}
