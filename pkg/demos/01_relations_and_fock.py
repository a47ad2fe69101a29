"""Normal forms of words and a numerical check of the relations on a truncated Fock space."""

import random

from twistops.angles import SQRT2_MINUS_1
from twistops.fock import build_scalar_rep, max_relation_residual, relation_residuals, word_operator
from twistops.relations import Signature, format_word, monomial_word, normal_form, parse_word, random_word

sig = Signature(1, 1)
w = parse_word("s2* s1 s2 s1*")
print("word        :", format_word(w))
print("normal form :", normal_form(w, sig))

rep = build_scalar_rep(SQRT2_MINUS_1, 8, sig)
print("relation residual on the interior:", max_relation_residual(relation_residuals(rep)))

mask = rep.interior(6)
rng = random.Random(0)
worst = 0.0
for _ in range(100):
    v = random_word(sig, 6, rng)
    d = abs(word_operator(rep, v)[:, mask] - word_operator(rep, monomial_word(normal_form(v, sig)))[:, mask])
    worst = max(worst, d.max() if d.nnz else 0.0)
print("max deviation between words and their normal forms:", worst)
