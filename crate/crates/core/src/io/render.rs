//! Kernel grid images (PNG/PGM) and proportion bar charts (SVG).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::ProportionRow;
use crate::dog::Kernel;
use crate::error::{Error, Result};

const SEPARATOR: u8 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colormap {
    /// Blue for negative, white for zero, red for positive.
    Diverging,
    Gray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    PerKernel,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub columns: usize,
    pub cell_px: usize,
    pub colormap: Colormap,
    pub normalize: Normalize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            columns: 8,
            cell_px: 32,
            colormap: Colormap::Diverging,
            normalize: Normalize::PerKernel,
        }
    }
}

/// RGB raster, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
}

impl Raster {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
    abs: f64,
}

fn range_of<'a>(values: impl Iterator<Item = &'a f64>) -> Range {
    values.fold(
        Range {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            abs: 0.0,
        },
        |r, &v| Range {
            lo: r.lo.min(v),
            hi: r.hi.max(v),
            abs: r.abs.max(v.abs()),
        },
    )
}

fn color(v: f64, range: Range, colormap: Colormap) -> [u8; 3] {
    let byte = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
    match colormap {
        Colormap::Diverging => {
            if range.abs == 0.0 || v == 0.0 {
                return [255, 255, 255];
            }
            let t = (v / range.abs).clamp(-1.0, 1.0);
            let fade = byte(1.0 - t.abs());
            if t > 0.0 {
                [255, fade, fade]
            } else {
                [fade, fade, 255]
            }
        }
        Colormap::Gray => {
            let span = range.hi - range.lo;
            let g = if span > 0.0 { byte((v - range.lo) / span) } else { 128 };
            [g, g, g]
        }
    }
}

/// Tiles kernels left to right, top to bottom, with 1-pixel separators.
pub fn rasterize_grid(kernels: &[Kernel], spec: &RenderSpec) -> Result<Raster> {
    let Some(first) = kernels.first() else {
        return Err(Error::InvalidInput("nothing to render".into()));
    };
    let size = first.size();
    if kernels.iter().any(|k| k.size() != size) {
        return Err(Error::InvalidInput("kernels must share one size".into()));
    }
    if spec.columns == 0 || spec.cell_px < size {
        return Err(Error::InvalidInput(format!(
            "need columns > 0 and cell_px >= kernel size {size}, got {} and {}",
            spec.columns, spec.cell_px
        )));
    }
    let cols = spec.columns.min(kernels.len());
    let rows = kernels.len().div_ceil(cols);
    let cell = spec.cell_px;
    let width = cols * cell + cols + 1;
    let height = rows * cell + rows + 1;
    let mut rgb = vec![SEPARATOR; width * height * 3];
    let global = range_of(kernels.iter().flat_map(|k| k.weights()));

    for (idx, kernel) in kernels.iter().enumerate() {
        let range = match spec.normalize {
            Normalize::PerKernel => range_of(kernel.weights().iter()),
            Normalize::Global => global,
        };
        let x0 = 1 + (idx % cols) * (cell + 1);
        let y0 = 1 + (idx / cols) * (cell + 1);
        for py in 0..cell {
            let row = py * size / cell;
            for px in 0..cell {
                let col = px * size / cell;
                let c = color(kernel.get(row, col), range, spec.colormap);
                let i = 3 * ((y0 + py) * width + x0 + px);
                rgb[i..i + 3].copy_from_slice(&c);
            }
        }
    }
    Ok(Raster { width, height, rgb })
}

pub fn encode_png(raster: &Raster) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, raster.width as u32, raster.height as u32);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writer
            .write_image_data(&raster.rgb)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    Ok(out)
}

/// Binary PGM (P5) from the red channel; gray rasters have equal channels.
pub fn encode_pgm(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend(raster.rgb.chunks_exact(3).map(|p| p[0]));
    out
}

/// Writes a PNG for the diverging map and a PGM for gray.
pub fn render_kernel_grid(kernels: &[Kernel], spec: &RenderSpec, path: impl AsRef<Path>) -> Result<()> {
    let raster = rasterize_grid(kernels, spec)?;
    let bytes = match spec.colormap {
        Colormap::Diverging => encode_png(&raster)?,
        Colormap::Gray => encode_pgm(&raster),
    };
    super::write_atomic(path.as_ref(), &bytes)
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const PLOT_HEIGHT: f64 = 200.0;
const BAR_WIDTH: f64 = 24.0;
const GROUP_GAP: f64 = 32.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const LEGEND_WIDTH: f64 = 110.0;
const SERIES: [(&str, &str); 3] = [("On", "#d62728"), ("Off", "#1f77b4"), ("Other", "#7f7f7f")];

/// Grouped bar chart: one group per model, bars for on, off and other.
pub fn histogram_svg(rows: &[ProportionRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("proportion table is empty".into()));
    }
    let group_width = 3.0 * BAR_WIDTH + GROUP_GAP;
    let plot_width = rows.len() as f64 * group_width + GROUP_GAP;
    let width = MARGIN_LEFT + plot_width + LEGEND_WIDTH;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let base = MARGIN_TOP + PLOT_HEIGHT;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">Filter proportions by cluster</text>"#,
        MARGIN_LEFT + plot_width / 2.0
    );
    // axes and y ticks
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{base}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_LEFT}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        MARGIN_LEFT + plot_width
    );
    for tick in 0..=4 {
        let frac = tick as f64 / 4.0;
        let y = base - frac * PLOT_HEIGHT;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{frac:.2}</text>"#,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">Proportion</text>"#,
        MARGIN_TOP + PLOT_HEIGHT / 2.0,
        MARGIN_TOP + PLOT_HEIGHT / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">Model</text>"#,
        MARGIN_LEFT + plot_width / 2.0,
        height - 12.0
    );

    for (g, row) in rows.iter().enumerate() {
        let x0 = MARGIN_LEFT + GROUP_GAP + g as f64 * group_width;
        for (s, value) in [row.on, row.off, row.other].into_iter().enumerate() {
            let h = value.clamp(0.0, 1.0) * PLOT_HEIGHT;
            let _ = writeln!(
                svg,
                r#"<rect class="bar" data-series="{}" x="{:.4}" y="{:.4}" width="{BAR_WIDTH}" height="{:.4}" fill="{}"/>"#,
                SERIES[s].0,
                x0 + s as f64 * BAR_WIDTH,
                base - h,
                h,
                SERIES[s].1
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.4}" y="{}" text-anchor="middle">{}</text>"#,
            x0 + 1.5 * BAR_WIDTH,
            base + 18.0,
            escape_xml(&row.model_tag)
        );
    }

    let lx = MARGIN_LEFT + plot_width + 16.0;
    for (s, (name, fill)) in SERIES.iter().enumerate() {
        let y = MARGIN_TOP + s as f64 * 20.0;
        let _ = writeln!(
            svg,
            r#"<rect class="legend" x="{lx}" y="{y}" width="12" height="12" fill="{fill}"/>"#
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{name}</text>"#, lx + 18.0, y + 10.0);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_histogram(rows: &[ProportionRow], path: impl AsRef<Path>) -> Result<()> {
    super::write_atomic(path.as_ref(), histogram_svg(rows)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernels(n: usize) -> Vec<Kernel> {
        (0..n)
            .map(|i| Kernel::new(3, (0..9).map(|j| (i + j) as f64 - 4.0).collect()).unwrap())
            .collect()
    }

    #[test]
    fn twelve_kernels_four_columns() {
        let spec = RenderSpec {
            columns: 4,
            cell_px: 6,
            ..RenderSpec::default()
        };
        let r = rasterize_grid(&kernels(12), &spec).unwrap();
        assert_eq!(r.width, 4 * 6 + 5);
        assert_eq!(r.height, 3 * 6 + 4);
    }

    #[test]
    fn zero_kernel_is_white() {
        let zero = Kernel::new(3, vec![0.0; 9]).unwrap();
        let spec = RenderSpec {
            columns: 1,
            cell_px: 9,
            ..RenderSpec::default()
        };
        let r = rasterize_grid(&[zero], &spec).unwrap();
        for y in 1..10 {
            for x in 1..10 {
                assert_eq!(r.pixel(x, y), [255, 255, 255]);
            }
        }
        assert_eq!(r.pixel(0, 0), [SEPARATOR; 3]);
    }

    #[test]
    fn diverging_signs() {
        let k = Kernel::new(3, vec![-1.0, 0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let spec = RenderSpec {
            columns: 1,
            cell_px: 3,
            ..RenderSpec::default()
        };
        let r = rasterize_grid(&[k], &spec).unwrap();
        assert_eq!(r.pixel(1, 1), [0, 0, 255]);
        assert_eq!(r.pixel(3, 1), [255, 0, 0]);
        assert_eq!(r.pixel(2, 2), [255, 128, 128]);
    }

    #[test]
    fn cell_smaller_than_kernel_rejected() {
        let spec = RenderSpec {
            cell_px: 2,
            ..RenderSpec::default()
        };
        assert!(rasterize_grid(&kernels(1), &spec).is_err());
        assert!(rasterize_grid(&[], &RenderSpec::default()).is_err());
    }

    #[test]
    fn pgm_header() {
        let spec = RenderSpec {
            columns: 2,
            cell_px: 3,
            colormap: Colormap::Gray,
            normalize: Normalize::Global,
        };
        let r = rasterize_grid(&kernels(2), &spec).unwrap();
        let pgm = encode_pgm(&r);
        let header = format!("P5\n{} {}\n255\n", r.width, r.height);
        assert!(pgm.starts_with(header.as_bytes()));
        assert_eq!(pgm.len(), header.len() + r.width * r.height);
    }

    fn bar_heights(svg: &str) -> Vec<f64> {
        svg.lines()
            .filter(|l| l.contains("class=\"bar\""))
            .map(|l| {
                let start = l.find("height=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end].parse().unwrap()
            })
            .collect()
    }

    #[test]
    fn bars_proportional() {
        let rows = [ProportionRow {
            model_tag: "m".into(),
            on: 0.5,
            off: 0.3,
            other: 0.2,
        }];
        let h = bar_heights(&histogram_svg(&rows).unwrap());
        assert_eq!(h.len(), 3);
        assert!((h[0] / h[2] - 2.5).abs() < 1e-9);
        assert!((h[1] / h[2] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn two_models_six_bars_and_labels() {
        let rows: Vec<ProportionRow> = ["a<b", "c"]
            .iter()
            .map(|t| ProportionRow {
                model_tag: t.to_string(),
                on: 0.4,
                off: 0.4,
                other: 0.2,
            })
            .collect();
        let svg = histogram_svg(&rows).unwrap();
        assert_eq!(bar_heights(&svg).len(), 6);
        assert!(svg.contains("a&lt;b"));
        for label in [">On<", ">Off<", ">Other<", ">Proportion<", ">Model<"] {
            assert!(svg.contains(label), "{label}");
        }
        assert!(histogram_svg(&[]).is_err());
    }
}
