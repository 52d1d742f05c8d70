package org.jabref;

import org.junit.jupiter.api.Test;
import org.jabref.model.Entry;

class EntryTest {
    @Test
    void creates() {}
}
