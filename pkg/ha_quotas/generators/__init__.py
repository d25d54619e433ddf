"""Instance generators: hardness gadgets, roommates transformation, random fuzz corpus."""
