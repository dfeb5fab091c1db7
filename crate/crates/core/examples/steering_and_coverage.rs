//! Array responses, sector lookup and the mapped coordinates used by the
//! codebooks.

use quadbeam::geometry::{
    phi_map, spatial_frequencies, steering_vector, theta_map, upa_for_direction, ArrayGeometry, CoverageRange,
    Direction,
};

fn main() -> quadbeam::Result<()> {
    let geom = ArrayGeometry::new(8, 8)?;
    let dirs = [
        Direction::new(0.3, 1.4),
        Direction::new(2.0, 1.9),
        Direction::new(-2.5, 1.2),
        Direction::new(0.0, 0.2),
    ];
    for d in dirs {
        match upa_for_direction(d) {
            Some(k) => {
                let (u, v) = spatial_frequencies(k, d);
                let a = steering_vector(&geom, k, d);
                let range = CoverageRange::of(k);
                println!(
                    "({:+.3}, {:.3}) -> UPA {k}  sector az [{:+.3}, {:+.3}]  u {u:+.3} v {v:+.3}  \
                     Phi {:+.3} Theta {:+.3}  |a| {:.3}",
                    d.azimuth,
                    d.elevation,
                    range.azimuth.0,
                    range.azimuth.1,
                    phi_map(k, d.azimuth),
                    theta_map(d.elevation),
                    a.norm()
                );
            }
            None => println!("({:+.3}, {:.3}) is outside every sector", d.azimuth, d.elevation),
        }
    }
    Ok(())
}
