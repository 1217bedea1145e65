//! Gnuplot script generation from previously written CSV files. The scripts
//! reference the data by bare filename when they sit next to it, so a result
//! directory stays relocatable.

use std::fs;
use std::io;
use std::path::Path;

fn data_ref(script_dir: &Path, data_dir: &Path, name: &str) -> String {
    if script_dir == data_dir {
        name.to_string()
    } else {
        data_dir.join(name).display().to_string()
    }
}

pub fn timeseries_script(script_dir: &Path, data_dir: &Path) -> String {
    let data = data_ref(script_dir, data_dir, "series.csv");
    format!(
        "set datafile separator comma\n\
         set key autotitle columnhead\n\
         set xlabel 'time (us)'\n\
         set ylabel '4-tangle'\n\
         set grid\n\
         plot \"{data}\" using 1:2 with lines linewidth 2 notitle\n"
    )
}

pub fn scatter_script(script_dir: &Path, data_dir: &Path) -> String {
    let data = data_ref(script_dir, data_dir, "sweep.csv");
    format!(
        "set datafile separator comma\n\
         set key autotitle columnhead\n\
         set xlabel 'lambda'\n\
         set ylabel 'revival period (us)'\n\
         set cblabel 'eta_L (MHz)'\n\
         set grid\n\
         plot \"{data}\" using 1:3:2 with points pointtype 7 palette notitle\n"
    )
}

pub fn histogram_script(script_dir: &Path, data_dir: &Path) -> String {
    let data = data_ref(script_dir, data_dir, "histogram.csv");
    format!(
        "set datafile separator comma\n\
         set key autotitle columnhead\n\
         set xlabel 'lambda bin'\n\
         set ylabel 'summed revival period (us)'\n\
         set boxwidth 0.9 relative\n\
         set style fill solid 0.6\n\
         plot \"{data}\" using 1:2 with boxes notitle\n"
    )
}

pub fn heatmap_script(script_dir: &Path, data_dir: &Path) -> String {
    let data = data_ref(script_dir, data_dir, "contour.csv");
    format!(
        "set datafile separator comma\n\
         set xlabel 'eta_L (MHz)'\n\
         set ylabel 'lambda'\n\
         set cblabel 'log10 period (us)'\n\
         plot \"{data}\" nonuniform matrix with image notitle\n"
    )
}

/// Emit a script per recognized data file; returns the script names written.
pub fn emit_scripts(data_dir: &Path, out_dir: &Path) -> io::Result<Vec<&'static str>> {
    let mut written = Vec::new();
    let pairs: [(&str, &str, fn(&Path, &Path) -> String); 4] = [
        ("series.csv", "timeseries.gp", timeseries_script),
        ("sweep.csv", "scatter.gp", scatter_script),
        ("histogram.csv", "histogram.gp", histogram_script),
        ("contour.csv", "heatmap.gp", heatmap_script),
    ];
    for (data, script, render) in pairs {
        if data_dir.join(data).is_file() {
            fs::write(out_dir.join(script), render(out_dir, data_dir))?;
            written.push(script);
        }
    }
    Ok(written)
}
