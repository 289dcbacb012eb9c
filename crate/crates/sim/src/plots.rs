//! SVG figure panels.

use std::path::{Path, PathBuf};

use flc_sldo_core::controllers::Variant;
use flc_sldo_core::scenario::TraceRecord;
use plotters::prelude::*;

use crate::error::{Result, SimError};
use crate::trace::RunTrace;

const SIZE: (u32, u32) = (960, 420);
const PALETTE: [RGBColor; 5] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(110, 110, 110),
];

struct Series<'a> {
    label: String,
    points: Vec<(f64, f64)>,
    color: &'a RGBColor,
}

fn bounds(series: &[Series]) -> ((f64, f64), (f64, f64)) {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for (px, py) in series.iter().flat_map(|s| s.points.iter()) {
        if px.is_finite() && py.is_finite() {
            x = (x.0.min(*px), x.1.max(*px));
            y = (y.0.min(*py), y.1.max(*py));
        }
    }
    let pad = ((y.1 - y.0) * 0.05).max(1e-9);
    ((x.0, x.1.max(x.0 + 1e-9)), (y.0 - pad, y.1 + pad))
}

fn draw(path: &Path, title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<()> {
    let err = |e: &dyn std::fmt::Display| SimError::Plot {
        path: path.to_owned(),
        message: e.to_string(),
    };
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let ((x0, x1), (y0, y1)) = bounds(series);
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(36)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc(x_label)
        .y_desc(y_label)
        .draw()
        .map_err(|e| err(&e))?;
    for s in series {
        let color = *s.color;
        chart
            .draw_series(LineSeries::new(s.points.iter().copied(), color))
            .map_err(|e| err(&e))?
            .label(s.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| err(&e))?;
    root.present().map_err(|e| err(&e))?;
    Ok(())
}

fn pick(records: &[TraceRecord], every: usize, f: impl Fn(&TraceRecord) -> (f64, f64)) -> Vec<(f64, f64)> {
    records.iter().step_by(every.max(1)).map(f).collect()
}

/// Writes the panel set for a controller comparison into `dir` and returns
/// the files written. `every` thins the traces.
pub fn write_figures(dir: &Path, runs: &[(Variant, RunTrace)], every: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let mut written = Vec::new();
    let per_controller = |f: &dyn Fn(&TraceRecord) -> (f64, f64)| -> Vec<Series> {
        runs.iter()
            .enumerate()
            .map(|(i, (v, t))| Series {
                label: v.label().to_owned(),
                points: pick(&t.records, every, f),
                color: &PALETTE[i % PALETTE.len()],
            })
            .collect()
    };

    let mut emit = |name: &str, title: &str, xl: &str, yl: &str, series: Vec<Series>| -> Result<()> {
        let path = dir.join(name);
        draw(&path, title, xl, yl, &series)?;
        written.push(path);
        Ok(())
    };

    emit("states_x1.svg", "State x1", "t [s]", "x1", per_controller(&|r| (r.t, r.x1)))?;
    emit("states_x2.svg", "State x2", "t [s]", "x2", per_controller(&|r| (r.t, r.x2)))?;
    emit("control.svg", "Control signal", "t [s]", "u", per_controller(&|r| (r.t, r.u)))?;
    emit("phase_portrait.svg", "Phase portrait", "x1", "x2", per_controller(&|r| (r.x1, r.x2)))?;

    let reference = runs
        .iter()
        .find(|(v, _)| *v == Variant::FlcSldo)
        .or_else(|| runs.first())
        .map(|(_, t)| t);
    if let Some(t) = reference {
        let r = &t.records;
        let s = |label: &str, i: usize, f: &dyn Fn(&TraceRecord) -> (f64, f64)| Series {
            label: label.to_owned(),
            points: pick(r, every, f),
            color: &PALETTE[i],
        };
        emit(
            "estimates.svg",
            "Disturbance and estimates",
            "t [s]",
            "d",
            vec![
                s("d", 4, &|r| (r.t, r.d_true)),
                s("BNDO", 0, &|r| (r.t, r.d_hat_bn)),
                s("SLDO", 3, &|r| (r.t, r.d_hat_sl)),
            ],
        )?;
        emit(
            "estimation_error.svg",
            "Estimation error",
            "t [s]",
            "d - d_hat",
            vec![
                s("BNDO", 0, &|r| (r.t, r.d_true - r.d_hat_bn)),
                s("SLDO", 3, &|r| (r.t, r.d_true - r.d_hat_sl)),
            ],
        )?;
        emit(
            "tau.svg",
            "Estimation signal decomposition",
            "t [s]",
            "rate",
            vec![
                s("tau", 0, &|r| (r.t, r.tau)),
                s("tau_c", 1, &|r| (r.t, r.tau_c)),
                s("tau_n", 2, &|r| (r.t, r.tau_n)),
            ],
        )?;
        emit("q.svg", "Mixing weight q", "t [s]", "q", vec![s("q", 0, &|r| (r.t, r.q))])?;
    }
    Ok(written)
}
