"""Find candidate neologisms in synthetic count tables.

The popularization timestep t* is the first timestep where a word's
cumulative count exceeds alpha (operating value 1/300) of its total.
Words with t* at or after the Modern cutoff become candidates; automatic
filters then remove proper-noun-dominated tags and sharply peaked count
profiles, and allow/deny lists replace manual dictionary vetting.
"""

import numpy as np

from neolexica import DetectorConfig, detect_candidates, estimate_popularization_time
from neolexica.corpus import FrequencyTable
from neolexica.detect import apply_word_lists, filter_by_pos, filter_peaked, surviving

T = 10  # timesteps; Modern period starts at t = 6

words = {
    "steady": [100] * T,                                  # in use all along
    "risen": [0, 0, 0, 0, 0, 80, 120, 160, 200, 240],     # genuine late arrival
    "spikey": [0, 0, 0, 0, 0, 5000, 0, 0, 0, 0],          # templatic burst
    "brandname": [0, 0, 0, 0, 0, 90, 90, 90, 90, 90],     # proper name
    "denied": [0, 0, 0, 0, 0, 60, 80, 90, 110, 150],      # vetoed by deny list
}
table = FrequencyTable(list(words), np.array(list(words.values())))

for w in words:
    t_star = estimate_popularization_time(table.row(w), alpha=1 / 300)
    print(f"t*({w}) = {t_star}")

cfg = DetectorConfig(alpha=1 / 300, cutoff_timestep=6, min_total_count=300)
records = detect_candidates(table, cfg)
print("\ncandidates past cutoff:", [r.word for r in records])

histograms = {
    "risen": {"NN": 85, "VB": 15},
    "brandname": {"NNP": 95, "NN": 5},
    "spikey": {"NN": 100},
    "denied": {"NN": 100},
}
records = filter_by_pos(records, histograms)
records = filter_peaked(records, table, cfg)
records = apply_word_lists(records, deny=["denied"])
print("after filters:")
for r in sorted(records, key=lambda r: r.word):
    print(f"  {r.word:10} t*={r.t_star}  {r.status}")
print("verified:", [r.word for r in surviving(records)])
