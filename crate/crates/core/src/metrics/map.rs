use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::fiber::LinkElement;

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionMapPoint {
    pub distance_km: f64,
    pub cumulative_dispersion_ps_nm: f64,
    pub element_label: String,
}

/// Running sum of `D·L` and lumped DCM values, sampled at the launch point,
/// every kilometre inside fibers and every element boundary.
pub fn dispersion_map(elements: &[LinkElement]) -> Vec<DispersionMapPoint> {
    let mut points = alloc::vec![DispersionMapPoint {
        distance_km: 0.0,
        cumulative_dispersion_ps_nm: 0.0,
        element_label: String::from("launch"),
    }];
    let (mut z, mut acc) = (0.0f64, 0.0f64);
    for element in elements {
        let label = String::from(element.label());
        if let LinkElement::Fiber(fiber) = element {
            let whole_km = fiber.length_km.ceil() as usize;
            for km in 1..whole_km {
                points.push(DispersionMapPoint {
                    distance_km: z + km as f64,
                    cumulative_dispersion_ps_nm: acc + fiber.dispersion_ps_nm_km * km as f64,
                    element_label: label.clone(),
                });
            }
        }
        z += element.length_km();
        acc += element.cumulative_dispersion_ps_nm();
        points.push(DispersionMapPoint { distance_km: z, cumulative_dispersion_ps_nm: acc, element_label: label });
    }
    points
}
