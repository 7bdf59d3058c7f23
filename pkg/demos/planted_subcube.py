"""
Subcubes as whole components
============================

Below the connectivity threshold, small subcubes whose vertices pick only
internal directions split off. Plant one and find it again.
"""

from koutcube import SubcubeSpec, is_connected, plant_subcube_component, subcube_component_scan

spec = SubcubeSpec.from_sets(10, free={1, 4, 7}, ones={0, 9})
sample = plant_subcube_component(10, 3, spec, seed=4)
found = subcube_component_scan(sample)
print("planted:", sorted(spec.free), "free,", sorted(spec.ones), "ones")
print("found:  ", [(sorted(s.free), sorted(s.ones)) for s in found])
print("connected:", is_connected(sample))
