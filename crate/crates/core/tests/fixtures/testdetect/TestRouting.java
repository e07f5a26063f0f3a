package org.example.t3;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class TestRouting {
    private int helper() { return 3; }

    @Test
    public void routesToDefault() {
        assertEquals(3, helper());
    }
}
