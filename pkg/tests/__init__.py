# Test package for Photon4N
