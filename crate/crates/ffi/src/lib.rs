// Placeholder until the core API settles.
