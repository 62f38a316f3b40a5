//! Browser bindings: cylinder decompositions of `L(a,b)`, the pair-count convergence curve
//! and wind-tree billiard paths. Every entry point returns a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use flatcount::enumerate::{cylinders_in_direction, cylinders_up_to, CylinderRecord};
use flatcount::windtree::{self, billiard_trace, WindTreeModel, DEFAULT_PAIR};
use flatcount::{Scalar, Vec2};

fn scalar(name: &str, s: &str) -> Result<Scalar, String> {
    s.parse().map_err(|e| format!("{name}: {e}"))
}

fn model(a: &str, b: &str) -> Result<WindTreeModel, String> {
    WindTreeModel::new(scalar("a", a)?, scalar("b", b)?).map_err(|e| e.to_string())
}

/// Cylinders of `L(a,b)` in the direction `(x,y)`.
pub fn decomposition_json(a: &str, b: &str, x: &str, y: &str) -> Result<String, String> {
    let m = model(a, b)?;
    let s = windtree::build_lab_surface(m.a, m.b).map_err(|e| e.to_string())?;
    let v = Vec2::new(scalar("x", x)?, scalar("y", y)?);
    if v.x.is_zero() && v.y.is_zero() {
        return Err("direction must be nonzero".into());
    }
    // circumferences are bounded by the area over the shortest height, so a generous
    // multiple of |v|² finds every cylinder of a periodic direction with small entries
    let budget = v.norm2() * Scalar::int(400);
    let dec = cylinders_in_direction(&s, &v, &budget);
    let records: Vec<CylinderRecord> = dec.cylinders.iter().map(|c| CylinderRecord::new(&s, c)).collect();
    let covered = dec.cylinders.iter().fold(Scalar::zero(), |acc, c| acc + c.area);
    Ok(json!({
        "stratum": s.stratum_signature().to_string(),
        "area": s.area().to_string(),
        "covered": covered.to_string(),
        "periodic": covered == s.area(),
        "cylinders": records,
    })
    .to_string())
}

/// Weierstrass-pair estimate `N/(πL²)` at `steps` lengths up to `length`.
pub fn convergence_json(a: &str, b: &str, length: u32, steps: u32) -> Result<String, String> {
    if length == 0 || length > 40 || steps == 0 {
        return Err("length must be in 1..=40 and steps positive".into());
    }
    let m = model(a, b)?;
    let s = windtree::build_lab_surface(m.a, m.b).map_err(|e| e.to_string())?;
    let l = length as i128;
    let cyl = cylinders_up_to(&s, &Scalar::int(l));
    let lengths: Vec<Scalar> = (1..=steps as i128).map(|k| Scalar::ratio(l * k, steps as i128)).collect();
    let rows = windtree::windtree_rows(&m, &s, &cyl, &lengths, DEFAULT_PAIR).map_err(|e| e.to_string())?;
    let points: Vec<Value> =
        rows.iter().map(|r| json!({ "L": r.length.to_f64(), "estimate": r.estimate })).collect();
    Ok(json!({ "target": windtree::target_constant().to_f64(), "points": points }).to_string())
}

/// Billiard path in the unit cell from `(x0,y0)` in direction `(dx,dy)`.
pub fn billiard_json(a: &str, b: &str, x0: &str, y0: &str, dx: &str, dy: &str, max_length: u32) -> Result<String, String> {
    let m = model(a, b)?;
    let start = Vec2::new(scalar("x0", x0)?, scalar("y0", y0)?);
    let dir = Vec2::new(scalar("dx", dx)?, scalar("dy", dy)?);
    let t = billiard_trace(&m, start, dir, &Scalar::int(max_length as i128)).map_err(|e| e.to_string())?;
    let segments: Vec<[f64; 4]> =
        t.segments.iter().map(|s| [s.from.x.to_f64(), s.from.y.to_f64(), s.to.x.to_f64(), s.to.y.to_f64()]).collect();
    let end = match &t.end {
        windtree::BilliardEnd::Periodic { .. } => "periodic",
        windtree::BilliardEnd::Corner { .. } => "corner",
        windtree::BilliardEnd::Budget => "budget",
    };
    Ok(json!({
        "a": m.a.to_f64(),
        "b": m.b.to_f64(),
        "segments": segments,
        "reflections": t.reflections,
        "end": end,
        "period": t.period_length(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn decomposition(a: &str, b: &str, x: &str, y: &str) -> Result<String, JsError> {
    decomposition_json(a, b, x, y).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn convergence(a: &str, b: &str, length: u32, steps: u32) -> Result<String, JsError> {
    convergence_json(a, b, length, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn billiard(a: &str, b: &str, x0: &str, y0: &str, dx: &str, dy: &str, max_length: u32) -> Result<String, JsError> {
    billiard_json(a, b, x0, y0, dx, dy, max_length).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_decomposition_of_lab() {
        let v: Value = serde_json::from_str(&decomposition_json("1/2", "1/2", "1", "0").unwrap()).unwrap();
        assert_eq!(v["stratum"], "H(2)");
        assert_eq!(v["periodic"], true);
        assert_eq!(v["cylinders"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn slope_two_on_golden_lab() {
        let g = "3/2-1/2√5";
        let v: Value = serde_json::from_str(&decomposition_json(g, g, "1", "2").unwrap()).unwrap();
        assert_eq!(v["periodic"], true);
    }

    #[test]
    fn convergence_curve() {
        let v: Value = serde_json::from_str(&convergence_json("1/2", "1/2", 10, 5).unwrap()).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 5);
        assert!(convergence_json("1/2", "1/2", 0, 5).is_err());
    }

    #[test]
    fn billiard_path() {
        let v: Value = serde_json::from_str(&billiard_json("1/2", "1/2", "1/4", "1/4", "1", "0", 10).unwrap()).unwrap();
        assert_eq!(v["end"], "periodic");
        assert!(billiard_json("1/2", "1/2", "3/4", "3/4", "1", "0", 10).is_err());
        assert!(decomposition_json("1/2", "x", "1", "0").is_err());
    }
}
