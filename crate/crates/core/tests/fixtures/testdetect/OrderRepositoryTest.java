package org.example.t4;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class OrderRepositoryTest {
    private int helper() { return 4; }

    @Test
    public void findsById() {
        assertEquals(4, helper());
    }
}
