use pvjpeg::optimizer::{encode_perceptual, OptimizerConfig};
use pvjpeg::synth::synthetic_photo;
use std::time::Instant;

fn main() {
    let img = synthetic_photo(512, 512, 1);
    let cfg = OptimizerConfig::new(1.0);
    let t0 = Instant::now();
    let a = encode_perceptual(&img, &cfg).unwrap();
    let t1 = t0.elapsed();
    let b = encode_perceptual(&img, &cfg).unwrap();
    println!(
        "rounds {} cands {} size {} d {:.4} time {:?} deterministic {}",
        a.local_rounds, a.candidates_evaluated, a.best.size(), a.best.distance, t1,
        a.best.jpeg.bytes == b.best.jpeg.bytes
    );
    // 420 path
    let mut cfg420 = OptimizerConfig::new(3.5);
    cfg420.allow_yuv420 = true;
    let r = encode_perceptual(&img, &cfg420).unwrap();
    println!("420 allowed at loose target: sampling {:?} size {} d {:.4} over {}", r.best.provenance.sampling, r.best.size(), r.best.distance, r.over_budget);
    let gray = {
        let mut g = img.clone();
        for y in 0..512 { for x in 0..512 { let p = g.pixel(x,y); let v = ((p[0] as u16 + p[1] as u16 + p[2] as u16)/3) as u8; g.set_pixel(x,y,[v,v,v]); }}
        g
    };
    let r = encode_perceptual(&gray, &cfg420).unwrap();
    println!("420 on grayscale: sampling {:?}", r.best.provenance.sampling);
}
