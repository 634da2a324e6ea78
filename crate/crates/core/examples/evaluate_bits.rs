//! Builds an instance and evaluates challenges in both architectures.

use nrpuf::puf::{ArrayId, Architecture, Challenge, PufConfig, PufInstance};
use nrpuf::{Environment, Substreams};

fn main() -> nrpuf::Result<()> {
    let puf = PufInstance::build(&PufConfig::default(), 42)?;
    let env = Environment::default();
    let streams = Substreams::new(3);
    let mut rng = streams.named("challenges").rng();

    println!("challenge         hidden  dual  single  ideal  I_P(nA)  I_Q(nA)");
    for i in 0..8 {
        let c = Challenge::random(&mut rng);
        let mut eval_rng = streams.named("eval").child(i).rng();
        let dual = puf.evaluate(c, &env, 0, Architecture::Dual, &mut eval_rng)?;
        let single = puf.evaluate(c, &env, 0, Architecture::Single, &mut eval_rng)?;
        let ideal = puf.evaluate_ideal(c, &env, Architecture::Dual)?;
        println!(
            "{c}  {:>6}  {:>4}  {:>6}  {:>5}  {:>7.1}  {:>7.1}",
            u8::from(dual.hidden_bit),
            u8::from(dual.bit),
            u8::from(single.bit),
            u8::from(ideal),
            dual.i_p * 1e9,
            dual.i_q * 1e9
        );
    }

    let c = Challenge(0x0123_4567_89ab_cdef);
    for hidden in [false, true] {
        let sel = puf.selection(c, ArrayId::B, Some(hidden))?;
        println!("array B selection for hidden bit {}: {sel:?}", u8::from(hidden));
    }
    Ok(())
}
