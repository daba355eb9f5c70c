//! Trajectory CSV: `step_index,t,x0,…,x{n-1}`, one row per point.

use std::io::{Read, Write};

use polarint_core::{Point, Scalar, Trajectory};

use crate::error::{CliError, CliResult};

pub fn write_csv<S: Scalar, W: Write>(out: W, traj: &Trajectory<S>, dim: usize) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["step_index".to_string(), "t".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (index, point) in &traj.points {
        let t = S::from_i64(*index) * traj.h.clone();
        let mut row = vec![index.to_string(), t.to_text()];
        row.extend(point.iter().map(Scalar::to_text));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the points back, checking that indices are consecutive.
pub fn read_csv<S: Scalar, R: Read>(input: R, dim: usize) -> CliResult<Vec<Point<S>>> {
    let mut r = csv::Reader::from_reader(input);
    let width = r.headers()?.len();
    if width != dim + 2 {
        return Err(CliError::Config(format!(
            "trajectory has {} coordinate columns, system has dimension {dim}",
            width.saturating_sub(2)
        )));
    }
    let mut points = Vec::new();
    let mut previous: Option<i64> = None;
    for record in r.records() {
        let record = record?;
        let index: i64 = record[0]
            .parse()
            .map_err(|_| CliError::Config(format!("bad step index {:?}", &record[0])))?;
        if previous.is_some_and(|p| p + 1 != index) {
            return Err(CliError::Config(format!("trajectory rows are not consecutive at step {index}")));
        }
        previous = Some(index);
        let point = record.iter().skip(2).map(S::parse_str).collect::<polarint_core::Result<Vec<S>>>()?;
        points.push(point);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use polarint_core::Rational;

    #[test]
    fn round_trip_is_exact() {
        let traj = Trajectory {
            h: Rational::from_ratio(1, 4),
            points: vec![(0, vec![Rational::from_ratio(1, 3)]), (1, vec![Rational::from_ratio(-7, 2)])],
            singular_at: None,
            extension: false,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &traj, 1).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "step_index,t,x0\n0,0,1/3\n1,1/4,-7/2\n");
        assert_eq!(read_csv::<Rational, _>(&buf[..], 1).unwrap(), traj.point_slice());
    }

    #[test]
    fn doubles_keep_every_bit() {
        let x = 0.1f64 + 0.2;
        let traj = Trajectory {
            h: 0.01,
            points: vec![(0, vec![x, -1e-300])],
            singular_at: None,
            extension: false,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &traj, 2).unwrap();
        let back = read_csv::<f64, _>(&buf[..], 2).unwrap();
        assert_eq!(back[0][0].to_bits(), x.to_bits());
        assert_eq!(back[0][1], -1e-300);
    }
}
